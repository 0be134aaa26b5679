#include "tradenet/analysis.hpp"

#include "tradenet/error.hpp"
#include "tradenet/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace tradenet {

namespace {

bool known_metric(std::string_view metric) {
    return std::find(kMetricNames.begin(), kMetricNames.end(), metric) != kMetricNames.end();
}

bool all_equal(std::span<const double> v) {
    for (double x : v) {
        if (x != v.front()) return false;
    }
    return true;
}

// Quartile by linear interpolation on the sorted sample, h = (n-1)*q.
double quantile_sorted(const std::vector<double>& sorted, double q) {
    double h = (static_cast<double>(sorted.size()) - 1.0) * q;
    size_t lo = static_cast<size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

} // namespace

MetricSeries assemble_series(std::span<const MetricsRow> rows, std::string_view sector,
                             std::string_view metric) {
    if (!known_metric(metric)) {
        fail("unknown_metric", "no metric named '" + std::string(metric) + "'");
    }
    MetricSeries series;
    series.sector = std::string(sector);
    series.metric = std::string(metric);
    bool sector_seen = false;
    for (const MetricsRow& row : rows) {
        if (row.sector != sector) continue;
        sector_seen = true;
        if (auto v = metric_value(row, metric)) {
            series.points.emplace_back(row.year, *v);
        }
    }
    if (!sector_seen) {
        fail("unknown_sector", "no metrics rows for sector '" + std::string(sector) + "'");
    }
    std::sort(series.points.begin(), series.points.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return series;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        fail("length_mismatch", "series lengths differ: " + std::to_string(x.size()) + " vs " +
                                    std::to_string(y.size()));
    }
    if (x.size() < 2) {
        fail("insufficient_points", "need at least 2 points, got " + std::to_string(x.size()));
    }
    if (all_equal(x) || all_equal(y)) {
        fail("undefined_correlation", "a constant series has zero variance");
    }
    auto s = kernels::sums(x.data(), y.data(), x.size());
    double n = static_cast<double>(x.size());
    auto m = kernels::centered_moments(x.data(), y.data(), x.size(), s.sx / n, s.sy / n);
    if (!(m.sxx > 0.0) || !(m.syy > 0.0)) {
        fail("undefined_correlation", "a constant series has zero variance");
    }
    double r = m.sxy / std::sqrt(m.sxx * m.syy);
    return std::clamp(r, -1.0, 1.0);
}

CorrelationReport correlate_all(std::span<const MetricsRow> rows, const GdpSeries& gdp,
                                YearRange range) {
    CorrelationReport report;
    report.year_range = range;

    std::vector<std::string> sectors;
    for (const MetricsRow& row : rows) sectors.push_back(row.sector);
    std::sort(sectors.begin(), sectors.end());
    sectors.erase(std::unique(sectors.begin(), sectors.end()), sectors.end());

    for (const std::string& sector : sectors) {
        auto& cells = report.rows[sector];
        for (std::string_view metric : kMetricNames) {
            MetricSeries series = assemble_series(rows, sector, metric);
            std::vector<double> xs, ys;
            for (const auto& [year, value] : series.points) {
                if (!range.contains(year)) continue;
                if (auto g = gdp.value(year)) {
                    xs.push_back(value);
                    ys.push_back(*g);
                }
            }
            CorrelationCell cell;
            if (xs.size() < 2) {
                cell.note = "insufficient_overlap";
            } else if (all_equal(xs) || all_equal(ys)) {
                cell.note = "zero_variance";
            } else {
                cell.r = pearson(xs, ys);
            }
            cells.emplace(std::string(metric), std::move(cell));
        }
    }
    return report;
}

void VolumeAccumulator::add(const TradeRecord& record) {
    volumes_[record.reporter][record.year].add(record.export_value + record.import_value);
}

VolumeSeries VolumeAccumulator::finish(YearRange range, const OutlierRule& rule) const {
    if (range.span() < 2) {
        fail("bad_year_range", "volume change needs a range of at least 2 years");
    }
    VolumeSeries out;
    for (const auto& [country, by_year] : volumes_) {
        std::map<int, double> dst;
        for (const auto& [year, sum] : by_year) {
            if (range.contains(year)) dst[year] = sum.value();
        }
        if (!dst.empty()) out.per_country_volume[country] = std::move(dst);
    }

    struct PctTerm {
        std::string country;
        double pct;
        bool outlier = false;
    };

    bool any_pair = false;
    for (int year = range.first + 1; year <= range.last; ++year) {
        uint64_t zero_denominator = 0;
        uint64_t change_terms = 0;
        double change_sum = 0.0;
        std::vector<PctTerm> pct_terms;

        // per_country_volume is code-sorted, so the sums below are
        // order-stable.
        for (const auto& [country, by_year] : out.per_country_volume) {
            auto cur = by_year.find(year);
            auto prev = by_year.find(year - 1);
            if (cur == by_year.end() || prev == by_year.end()) continue;
            any_pair = true;
            double change = cur->second - prev->second;
            change_sum += change;
            ++change_terms;
            if (prev->second > 0.0) {
                pct_terms.push_back(PctTerm{country, change / prev->second});
            } else {
                ++zero_denominator;
            }
        }

        out.zero_denominator_count[year] = zero_denominator;
        if (change_terms > 0) {
            out.avg_change[year] = change_sum / static_cast<double>(change_terms);
        }
        if (pct_terms.empty()) continue;

        std::vector<double> dist;
        dist.reserve(pct_terms.size());
        for (const auto& t : pct_terms) dist.push_back(t.pct);
        std::sort(dist.begin(), dist.end());
        double q1 = quantile_sorted(dist, 0.25);
        double q3 = quantile_sorted(dist, 0.75);
        double threshold = q3 + rule.iqr_multiplier * (q3 - q1);

        double pct_sum = 0.0;
        double kept_sum = 0.0;
        uint64_t kept = 0;
        for (auto& t : pct_terms) {
            pct_sum += t.pct;
            t.outlier = std::abs(t.pct) > threshold;
            if (t.outlier) {
                out.outliers.push_back(VolumeSeries::Outlier{t.country, year, t.pct});
            } else {
                kept_sum += t.pct;
                ++kept;
            }
        }
        out.avg_pct_change[year] = pct_sum / static_cast<double>(pct_terms.size());
        if (kept > 0) {
            out.avg_pct_change_excl_outliers[year] = kept_sum / static_cast<double>(kept);
        }
    }

    if (!any_pair) {
        fail("no_consecutive_data", "no country has volumes in two consecutive years");
    }
    return out;
}

VolumeSeries volume_series(std::span<const TradeRecord> records, YearRange range,
                           const OutlierRule& rule) {
    VolumeAccumulator acc;
    for (const TradeRecord& r : records) {
        if (range.contains(r.year)) acc.add(r);
    }
    return acc.finish(range, rule);
}

} // namespace tradenet

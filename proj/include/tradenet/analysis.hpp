#pragma once

#include "tradenet/ingest.hpp"
#include "tradenet/metrics.hpp"
#include "tradenet/util.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tradenet {

struct MetricSeries {
    std::string sector;
    std::string metric;
    std::vector<std::pair<int, double>> points; // ascending years; missing years absent
};

// Throws unknown_metric / unknown_sector. Years with an absent value (empty
// graph diameters) are skipped, never interpolated.
MetricSeries assemble_series(std::span<const MetricsRow> rows, std::string_view sector,
                             std::string_view metric);

// Pearson's r via the centered two-pass formula, clamped to [-1, 1] against
// rounding overshoot. Throws length_mismatch, insufficient_points, or
// undefined_correlation (zero variance).
double pearson(std::span<const double> x, std::span<const double> y);

struct CorrelationCell {
    std::optional<double> r;
    std::string note; // reason token when r is absent ("zero_variance", ...)
};

struct CorrelationReport {
    YearRange year_range;
    // sector -> metric -> cell; every (sector, metric) pair is present.
    std::map<std::string, std::map<std::string, CorrelationCell, std::less<>>, std::less<>> rows;
};

// For each (sector, metric): Pearson r over the year-aligned intersection of
// the metric series and the GDP series restricted to `range`. Undefined
// cells are marked with a reason, never silently omitted.
CorrelationReport correlate_all(std::span<const MetricsRow> rows, const GdpSeries& gdp,
                                YearRange range);

struct OutlierRule {
    // Flag |pct_change| > q3 + iqr_multiplier * (q3 - q1) of that year's
    // pct distribution (quartiles by linear interpolation).
    double iqr_multiplier = 10.0;
};

struct VolumeSeries {
    // V(c, y): exports + imports summed over records reported by c in y.
    std::map<std::string, std::map<int, double>> per_country_volume;
    std::map<int, double> avg_change;                  // mean of V(c,y) - V(c,y-1)
    std::map<int, double> avg_pct_change;              // mean of change / V(c,y-1)
    std::map<int, double> avg_pct_change_excl_outliers;
    std::map<int, uint64_t> zero_denominator_count;    // V(c,y-1) == 0 exclusions

    struct Outlier {
        std::string country;
        int year = 0;
        double pct_change = 0.0;
        bool operator==(const Outlier&) const = default;
    };
    std::vector<Outlier> outliers; // sorted by (year, country)
};

// Streaming per-country volume aggregation (reporter attribution only).
class VolumeAccumulator {
public:
    void add(const TradeRecord& record);
    VolumeSeries finish(YearRange range, const OutlierRule& rule = {}) const;

private:
    std::map<std::string, std::map<int, NeumaierSum>> volumes_;
};

VolumeSeries volume_series(std::span<const TradeRecord> records, YearRange range,
                           const OutlierRule& rule = {});

} // namespace tradenet

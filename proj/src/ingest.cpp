#include "tradenet/ingest.hpp"

#include "tradenet/csv.hpp"
#include "tradenet/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace tradenet {

namespace {

bool is_four_digit_code(std::string_view s) {
    if (s.size() != 4) return false;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
    }
    return true;
}

size_t require_column(const std::vector<std::string_view>& header, const std::string& name) {
    for (size_t i = 0; i < header.size(); ++i) {
        if (trim(header[i]) == name) return i;
    }
    fail("missing_column", "required column '" + name + "' not found in header");
}

} // namespace

ParseStats parse_trade_records(std::istream& in, const FormatConfig& config,
                               const RecordSink& on_record, const RejectSink& on_reject) {
    LineReader reader(in);
    std::vector<std::string_view> fields;

    auto header = reader.next();
    if (!header) {
        fail("missing_column", "input is empty; a header row is required");
    }
    split_fields(header->text, config.delimiter, fields);
    const size_t ncols = fields.size();
    const size_t col_year = require_column(fields, config.columns.year);
    const size_t col_reporter = require_column(fields, config.columns.reporter);
    const size_t col_partner = require_column(fields, config.columns.partner);
    const size_t col_product = require_column(fields, config.columns.product);
    const size_t col_export = require_column(fields, config.columns.export_value);
    const size_t col_import = require_column(fields, config.columns.import_value);

    ParseStats stats;
    auto reject = [&](const CsvLine& line, const char* reason) {
        ++stats.rejects;
        on_reject(Reject{line.number, reason, std::string(line.text)});
    };

    while (auto line = reader.next()) {
        ++stats.rows;
        split_fields(line->text, config.delimiter, fields);
        if (fields.size() != ncols) {
            reject(*line, "field_count");
            continue;
        }

        auto year = parse_int(fields[col_year]);
        if (!year) {
            reject(*line, "bad_year");
            continue;
        }
        if (!config.study_years.contains(static_cast<int>(*year))) {
            reject(*line, "year_out_of_range");
            continue;
        }

        std::string reporter = normalize_country(fields[col_reporter]);
        std::string partner = normalize_country(fields[col_partner]);
        if (reporter.empty() || partner.empty()) {
            reject(*line, "empty_country");
            continue;
        }
        if (reporter == partner) {
            reject(*line, "self_trade");
            continue;
        }

        std::string_view product = trim(fields[col_product]);
        if (!is_four_digit_code(product)) {
            reject(*line, "bad_product");
            continue;
        }

        auto exports = parse_double(fields[col_export]);
        auto imports = parse_double(fields[col_import]);
        if (!exports || !imports || !std::isfinite(*exports) || !std::isfinite(*imports)) {
            reject(*line, "bad_value");
            continue;
        }
        if (*exports < 0.0 || *imports < 0.0) {
            reject(*line, "negative_value");
            continue;
        }

        ++stats.records;
        on_record(TradeRecord{static_cast<int>(*year), std::move(reporter), std::move(partner),
                              std::string(product), *exports, *imports});
    }

    if (in.bad()) {
        fail("io_error", "stream went bad while reading trade records");
    }
    stats.peak_buffer_bytes = reader.peak_buffer_bytes();
    return stats;
}

// ---------------------------------------------------------------------------
// SectorTaxonomy
// ---------------------------------------------------------------------------

const std::set<std::string>& SectorTaxonomy::default_sector_set() {
    static const std::set<std::string> sectors = {
        "Textiles", "Agriculture", "Stone", "Minerals", "Metals",
        "Chemicals", "Vehicles", "Machinery", "Electronics", "Other"};
    return sectors;
}

const std::vector<std::string>& SectorTaxonomy::default_analyzed_sectors() {
    static const std::vector<std::string> sectors = {
        "Agriculture", "Chemicals", "Electronics", "Machinery", "Metals",
        "Minerals", "Stone", "Textiles", "Vehicles"};
    return sectors;
}

void SectorTaxonomy::add(std::string product, std::string sector) {
    auto [it, inserted] = entries_.emplace(std::move(product), sector);
    if (!inserted && it->second != sector) {
        fail("taxonomy_conflict", "product '" + it->first + "' mapped to both '" + it->second +
                                      "' and '" + sector + "'");
    }
    sectors_.insert(std::move(sector));
}

SectorTaxonomy SectorTaxonomy::load(std::istream& in, const std::set<std::string>& allowed,
                                    char delimiter) {
    LineReader reader(in);
    std::vector<std::string_view> fields;
    SectorTaxonomy taxonomy;
    bool first = true;
    while (auto line = reader.next()) {
        if (line->text.empty()) continue;
        split_fields(line->text, delimiter, fields);
        if (first) {
            first = false;
            if (trim(fields[0]) == "product_code") continue;
        }
        if (fields.size() != 2) {
            fail("taxonomy_parse",
                 "line " + std::to_string(line->number) + ": expected product_code,sector_name");
        }
        std::string product(trim(fields[0]));
        std::string sector(trim(fields[1]));
        if (!is_four_digit_code(product)) {
            fail("taxonomy_parse", "line " + std::to_string(line->number) + ": product code '" +
                                       product + "' is not a 4-digit code");
        }
        if (!allowed.contains(sector)) {
            fail("unknown_sector",
                 "line " + std::to_string(line->number) + ": sector '" + sector + "'");
        }
        taxonomy.add(std::move(product), std::move(sector));
    }
    if (in.bad()) {
        fail("io_error", "stream went bad while reading taxonomy");
    }
    return taxonomy;
}

const std::string* SectorTaxonomy::sector(std::string_view product) const {
    auto it = entries_.find(std::string(product));
    return it == entries_.end() ? nullptr : &it->second;
}

size_t SectorTaxonomy::sector_size(std::string_view sector) const {
    size_t n = 0;
    for (const auto& [product, s] : entries_) {
        if (s == sector) ++n;
    }
    return n;
}

// ---------------------------------------------------------------------------
// GdpSeries
// ---------------------------------------------------------------------------

GdpSeries GdpSeries::from_points(std::vector<std::pair<int, double>> points) {
    if (points.empty()) {
        fail("gdp_empty", "GDP series has no points");
    }
    std::sort(points.begin(), points.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (size_t i = 0; i < points.size(); ++i) {
        auto [year, value] = points[i];
        if (!std::isfinite(value) || value <= 0.0) {
            fail("gdp_not_positive",
                 "year " + std::to_string(year) + " has non-positive value " + fmt_g12(value));
        }
        if (i > 0) {
            int prev = points[i - 1].first;
            if (year == prev) {
                fail("gdp_duplicate_year", "year " + std::to_string(year) + " appears twice");
            }
            if (year != prev + 1) {
                fail("gdp_year_gap", "gap between " + std::to_string(prev) + " and " +
                                         std::to_string(year));
            }
        }
    }
    GdpSeries series;
    series.points_ = std::move(points);
    return series;
}

GdpSeries GdpSeries::load(std::istream& in, char delimiter) {
    LineReader reader(in);
    std::vector<std::string_view> fields;
    std::vector<std::pair<int, double>> points;
    bool first = true;
    while (auto line = reader.next()) {
        if (line->text.empty()) continue;
        split_fields(line->text, delimiter, fields);
        if (first) {
            first = false;
            if (trim(fields[0]) == "year") continue;
        }
        if (fields.size() != 2) {
            fail("gdp_parse", "line " + std::to_string(line->number) + ": expected year,gdp_value");
        }
        auto year = parse_int(fields[0]);
        auto value = parse_double(fields[1]);
        if (!year || !value) {
            fail("gdp_parse", "line " + std::to_string(line->number) + ": cannot parse row");
        }
        points.emplace_back(static_cast<int>(*year), *value);
    }
    if (in.bad()) {
        fail("io_error", "stream went bad while reading GDP series");
    }
    return from_points(std::move(points));
}

std::optional<double> GdpSeries::value(int year) const {
    if (points_.empty() || year < points_.front().first || year > points_.back().first) {
        return std::nullopt;
    }
    return points_[static_cast<size_t>(year - points_.front().first)].second;
}

YearRange GdpSeries::years() const {
    return YearRange{points_.front().first, points_.back().first};
}

// ---------------------------------------------------------------------------
// Coverage filter
// ---------------------------------------------------------------------------

CoverageAccumulator::CoverageAccumulator(YearRange range)
    : range_(range), words_(static_cast<size_t>(range.span() + 63) / 64) {
    if (range.first > range.last) {
        fail("bad_year_range", "coverage range is empty");
    }
}

void CoverageAccumulator::observe(std::string_view reporter, std::string_view partner, int year) {
    if (!range_.contains(year)) return;
    size_t bit = static_cast<size_t>(year - range_.first);
    for (std::string_view country : {reporter, partner}) {
        auto [it, inserted] = presence_.try_emplace(std::string(country));
        if (inserted) it->second.assign(words_, 0);
        it->second[bit / 64] |= uint64_t{1} << (bit % 64);
    }
}

void CoverageAccumulator::observe(const TradeRecord& record) {
    observe(record.reporter, record.partner, record.year);
}

CoverageFilterResult CoverageAccumulator::finish() const {
    if (presence_.empty()) {
        fail("empty_records", "no records observed; nothing to filter");
    }
    CoverageFilterResult result;
    result.year_range = range_;
    const size_t span = static_cast<size_t>(range_.span());
    for (const auto& [country, bits] : presence_) {
        size_t present = 0;
        for (uint64_t w : bits) present += static_cast<size_t>(std::popcount(w));
        if (present == span) {
            result.retained.insert(country);
        } else {
            result.dropped.insert(country);
        }
    }
    return result;
}

CoverageFilterResult filter_full_coverage_countries(std::span<const TradeRecord> records,
                                                    YearRange range) {
    if (records.empty()) {
        fail("empty_records", "no records observed; nothing to filter");
    }
    CoverageAccumulator acc(range);
    for (const TradeRecord& r : records) acc.observe(r);
    return acc.finish();
}

} // namespace tradenet

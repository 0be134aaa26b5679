#pragma once

#include "tradenet/util.hpp"

#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tradenet {

// One bilateral trade observation. Country codes are opaque normalized
// tokens (trimmed, upper-cased); product is a 4-digit code.
struct TradeRecord {
    int year = 0;
    std::string reporter;
    std::string partner;
    std::string product;
    double export_value = 0.0;
    double import_value = 0.0;

    bool operator==(const TradeRecord&) const = default;
};

struct ColumnMap {
    std::string year = "year";
    std::string reporter = "reporter";
    std::string partner = "partner";
    std::string product = "product";
    std::string export_value = "export_value";
    std::string import_value = "import_value";
};

struct FormatConfig {
    char delimiter = ',';
    ColumnMap columns;
    YearRange study_years{1995, 2018};
};

struct Reject {
    uint64_t line_number = 0;
    std::string reason; // stable token, see README
    std::string raw;
};

struct ParseStats {
    uint64_t rows = 0;    // data rows seen (header excluded)
    uint64_t records = 0; // valid records emitted
    uint64_t rejects = 0;
    size_t peak_buffer_bytes = 0;

    bool operator==(const ParseStats&) const = default;
};

using RecordSink = std::function<void(TradeRecord&&)>;
using RejectSink = std::function<void(const Reject&)>;

// Streams records in file order with bounded memory. Malformed rows go to
// the reject sink with a line number and reason; every data row becomes
// exactly one of {record, reject}. Missing required columns are fatal
// (missing_column); a broken stream is fatal (io_error).
ParseStats parse_trade_records(std::istream& in, const FormatConfig& config,
                               const RecordSink& on_record, const RejectSink& on_reject);

// Maps 4-digit product codes to sector names drawn from a closed set.
class SectorTaxonomy {
public:
    // Input: product_code,sector_name rows (optional header). Conflicting
    // duplicates and sector names outside `allowed` are fatal.
    static SectorTaxonomy load(std::istream& in,
                               const std::set<std::string>& allowed = default_sector_set(),
                               char delimiter = ',');

    // nullptr when the product code is unknown.
    const std::string* sector(std::string_view product) const;
    size_t sector_size(std::string_view sector) const;
    const std::set<std::string>& sectors() const { return sectors_; }
    const std::map<std::string, std::string>& entries() const { return entries_; }
    size_t size() const { return entries_.size(); }

    void add(std::string product, std::string sector);

    static const std::set<std::string>& default_sector_set();    // all ten
    static const std::vector<std::string>& default_analyzed_sectors(); // ten minus Other

private:
    std::map<std::string, std::string> entries_;
    std::set<std::string> sectors_;
};

// Global GDP by year: strictly positive values, gap-free ascending years.
class GdpSeries {
public:
    static GdpSeries load(std::istream& in, char delimiter = ',');
    static GdpSeries from_points(std::vector<std::pair<int, double>> points);

    const std::vector<std::pair<int, double>>& points() const { return points_; }
    std::optional<double> value(int year) const;
    YearRange years() const;
    size_t size() const { return points_.size(); }

private:
    std::vector<std::pair<int, double>> points_; // ascending years
};

struct CoverageFilterResult {
    std::set<std::string> retained;
    std::set<std::string> dropped;
    YearRange year_range;
};

// Per-country year-presence accumulator. A country counts as present in a
// year when it appears as reporter or partner in at least one record.
class CoverageAccumulator {
public:
    explicit CoverageAccumulator(YearRange range);

    void observe(const TradeRecord& record);
    void observe(std::string_view reporter, std::string_view partner, int year);

    // Retained iff present in every year of the range. Throws empty_records
    // when nothing was observed.
    CoverageFilterResult finish() const;

private:
    YearRange range_;
    size_t words_;
    std::map<std::string, std::vector<uint64_t>> presence_;
};

CoverageFilterResult filter_full_coverage_countries(std::span<const TradeRecord> records,
                                                    YearRange range);

} // namespace tradenet

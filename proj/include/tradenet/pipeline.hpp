#pragma once

#include "tradenet/analysis.hpp"
#include "tradenet/graph.hpp"
#include "tradenet/ingest.hpp"
#include "tradenet/util.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace tradenet {

struct RunConfig {
    std::string records_path;
    std::string taxonomy_path;
    std::string gdp_path;
    YearRange years{1995, 2018};
    std::vector<std::string> sectors; // empty = default nine (+ Other when include_other)
    bool include_other = false;
    double min_edge_value = 0.0;
    OutlierRule outlier_rule;
    std::string out_dir = "out";
    std::string cache_dir = "cache";
    int threads = 0;
    FormatConfig format;

    std::vector<std::string> analyzed_sectors() const;
    void validate() const; // throws on bad ranges / non-distinct paths
};

struct IngestSummary {
    uint64_t observed_countries = 0;
    uint64_t retained = 0;
    uint64_t dropped = 0;
    uint64_t rows = 0;
    uint64_t records_parsed = 0;
    uint64_t rejects = 0;
    uint64_t records_cached = 0;
    bool cache_hit = false;
};

struct BuildSummary {
    uint64_t graphs_written = 0;
    uint64_t unknown_product_records = 0;
    bool cache_hit = false;
};

struct ReportSummary {
    uint64_t metrics_rows = 0;
    uint64_t correlation_cells = 0;
    uint64_t undefined_cells = 0;
    uint64_t volume_years = 0;
    uint64_t outliers = 0;
};

// Stage 1: validate inputs, apply the coverage filter, write the filtered
// record cache plus retained/dropped/rejects reports. Reuses the cache when
// the manifest entry matches the current inputs and parameters exactly.
IngestSummary cmd_ingest(const RunConfig& config);

// Stage 2: one edge-list dump per (sector, year) cell from the record
// cache. Requires a valid ingest cache ("ingest_required" otherwise).
BuildSummary cmd_build(const RunConfig& config);

// Stage 3: metrics table, correlation report, volume report and per-figure
// plot data from the graph cache. Requires a valid build cache
// ("build_required" otherwise).
ReportSummary cmd_report(const RunConfig& config);

// Record-cache access, exposed for tests and tooling.
void for_each_cached_record(const std::filesystem::path& cache_file,
                            const std::function<void(const TradeRecord&)>& fn);

std::filesystem::path graph_dump_path(const RunConfig& config, const std::string& sector,
                                      int year);

} // namespace tradenet

#include "tradenet/error.hpp"
#include "tradenet/kernels.hpp"
#include "tradenet/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

namespace {

struct CliOptions {
    tradenet::RunConfig config;
    std::string years = "1995:2018";
    std::string delimiter = ",";
};

void print_ingest(const tradenet::IngestSummary& s) {
    std::printf("retained %llu of %llu countries (%llu dropped)\n",
                static_cast<unsigned long long>(s.retained),
                static_cast<unsigned long long>(s.observed_countries),
                static_cast<unsigned long long>(s.dropped));
    std::printf("rows %llu, records %llu, rejects %llu, cached %llu%s\n",
                static_cast<unsigned long long>(s.rows),
                static_cast<unsigned long long>(s.records_parsed),
                static_cast<unsigned long long>(s.rejects),
                static_cast<unsigned long long>(s.records_cached),
                s.cache_hit ? " [cache hit]" : "");
}

void print_build(const tradenet::BuildSummary& s) {
    std::printf("graphs %llu, unknown-product records %llu%s\n",
                static_cast<unsigned long long>(s.graphs_written),
                static_cast<unsigned long long>(s.unknown_product_records),
                s.cache_hit ? " [cache hit]" : "");
}

void print_report(const tradenet::ReportSummary& s) {
    std::printf("metrics rows %llu; correlation cells %llu (%llu undefined); "
                "volume years %llu; outliers %llu\n",
                static_cast<unsigned long long>(s.metrics_rows),
                static_cast<unsigned long long>(s.correlation_cells),
                static_cast<unsigned long long>(s.undefined_cells),
                static_cast<unsigned long long>(s.volume_years),
                static_cast<unsigned long long>(s.outliers));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tradenet: per-sector trade network construction and complexity analytics"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "Key-value file mirroring the flags; flags take precedence");

    CliOptions opt;
    app.add_option("--records", opt.config.records_path, "Bilateral trade records CSV");
    app.add_option("--taxonomy", opt.config.taxonomy_path, "product_code,sector_name CSV");
    app.add_option("--gdp", opt.config.gdp_path, "year,gdp_value CSV");
    app.add_option("--years", opt.years, "Inclusive study range A:B (default 1995:2018)");
    app.add_option("--sectors", opt.config.sectors,
                   "Sectors to analyze (default: the nine named sectors)");
    app.add_flag("--include-other", opt.config.include_other,
                 "Add the 'Other' sector to the default set");
    app.add_option("--min-edge-value", opt.config.min_edge_value,
                   "Edge exists iff aggregate pair trade > this (default 0)");
    app.add_option("--out", opt.config.out_dir, "Report output directory (default out)");
    app.add_option("--cache", opt.config.cache_dir, "Cache directory (default cache)");
    app.add_option("--threads", opt.config.threads, "Worker threads (0 = hardware)");
    app.add_option("--delimiter", opt.delimiter, "Trade records field delimiter (default ,)");
    app.add_option("--col-year", opt.config.format.columns.year, "Records column name for year");
    app.add_option("--col-reporter", opt.config.format.columns.reporter,
                   "Records column name for reporter");
    app.add_option("--col-partner", opt.config.format.columns.partner,
                   "Records column name for partner");
    app.add_option("--col-product", opt.config.format.columns.product,
                   "Records column name for product");
    app.add_option("--col-export", opt.config.format.columns.export_value,
                   "Records column name for export value");
    app.add_option("--col-import", opt.config.format.columns.import_value,
                   "Records column name for import value");
    app.add_option("--outlier-iqr-mult", opt.config.outlier_rule.iqr_multiplier,
                   "Outlier threshold multiplier (default 10)");

    auto* cmd_ingest = app.add_subcommand("ingest", "Parse, validate and coverage-filter records");
    auto* cmd_build = app.add_subcommand("build", "Construct one graph per (sector, year)");
    auto* cmd_report = app.add_subcommand("report", "Metrics, correlation and volume reports");
    auto* cmd_all = app.add_subcommand("all", "ingest + build + report");

    CLI11_PARSE(app, argc, argv);

    try {
        opt.config.years = tradenet::parse_year_range(opt.years);
        if (opt.delimiter.size() != 1) {
            tradenet::fail("bad_delimiter", "delimiter must be a single character");
        }
        opt.config.format.delimiter = opt.delimiter[0];
        opt.config.format.study_years = opt.config.years;

        if (cmd_ingest->parsed() || cmd_all->parsed()) {
            print_ingest(tradenet::cmd_ingest(opt.config));
        }
        if (cmd_build->parsed() || cmd_all->parsed()) {
            print_build(tradenet::cmd_build(opt.config));
        }
        if (cmd_report->parsed() || cmd_all->parsed()) {
            print_report(tradenet::cmd_report(opt.config));
        }
    } catch (const tradenet::Error& e) {
        std::fprintf(stderr, "error: %s: %s\n", e.token().c_str(), e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: internal: %s\n", e.what());
        return 1;
    }
    return 0;
}

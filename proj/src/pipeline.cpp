#include "tradenet/pipeline.hpp"

#include "tradenet/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <fstream>
#include <set>

namespace tradenet {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "record cache assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'T', 'N', 'R', 'C', '0', '0', '0', '1'};
constexpr std::streamoff kRecordCountOffset = 32; // magic(8) + 2x u32 years + 2x u64 counts

// --- binary helpers ---------------------------------------------------------

template <typename T>
void put_raw(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get_raw(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

void put_str(std::ostream& out, const std::string& s) {
    put_raw<uint32_t>(out, static_cast<uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_str(std::istream& in) {
    uint32_t len = get_raw<uint32_t>(in);
    std::string s(len, '\0');
    in.read(s.data(), len);
    return s;
}

// --- config / keys -----------------------------------------------------------

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string years_text(YearRange r) {
    return std::to_string(r.first) + ":" + std::to_string(r.last);
}

void require_input(const std::string& path, const char* token) {
    if (path.empty() || !fs::exists(path)) {
        fail(token, "'" + path + "' does not exist");
    }
}

std::string ingest_key(const RunConfig& c) {
    const ColumnMap& m = c.format.columns;
    std::string material = "ingest-v1|records=" + to_hex(hash_file(c.records_path)) +
                           "|delim=" + std::string(1, c.format.delimiter) + "|cols=" + m.year +
                           "," + m.reporter + "," + m.partner + "," + m.product + "," +
                           m.export_value + "," + m.import_value + "|years=" +
                           years_text(c.years);
    return to_hex(fnv64(material));
}

std::string build_key(const RunConfig& c, const std::string& records_bin_hash) {
    std::string material = "build-v1|records_bin=" + records_bin_hash +
                           "|taxonomy=" + to_hex(hash_file(c.taxonomy_path)) +
                           "|sectors=" + join(c.analyzed_sectors(), ',') +
                           "|min_edge=" + fmt_g12(c.min_edge_value) +
                           "|years=" + years_text(c.years);
    return to_hex(fnv64(material));
}

std::string sanitize_for_filename(const std::string& name) {
    std::string out = name;
    for (char& ch : out) {
        bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                  (ch >= '0' && ch <= '9') || ch == '-' || ch == '_';
        if (!ok) ch = '_';
    }
    return out;
}

// --- manifest ----------------------------------------------------------------

fs::path manifest_path(const RunConfig& c) { return fs::path(c.cache_dir) / "manifest.json"; }
fs::path records_bin_path(const RunConfig& c) { return fs::path(c.cache_dir) / "records.bin"; }
fs::path coverage_path(const RunConfig& c) { return fs::path(c.cache_dir) / "coverage.json"; }
fs::path cache_rejects_path(const RunConfig& c) { return fs::path(c.cache_dir) / "rejects.csv"; }

json load_manifest(const RunConfig& c) {
    fs::path p = manifest_path(c);
    if (!fs::exists(p)) return json::object();
    json j = json::parse(read_file(p), nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object()) return json::object();
    return j;
}

void save_manifest(const RunConfig& c, json manifest) {
    manifest["format_version"] = 1;
    write_file_atomic(manifest_path(c), manifest.dump(2) + "\n");
}

// --- taxonomy / gdp loading with path-aware errors ---------------------------

std::set<std::string> allowed_sectors(const RunConfig& c) {
    std::set<std::string> allowed = SectorTaxonomy::default_sector_set();
    for (const std::string& s : c.analyzed_sectors()) allowed.insert(s);
    return allowed;
}

SectorTaxonomy load_taxonomy_file(const RunConfig& c) {
    require_input(c.taxonomy_path, "taxonomy_not_found");
    std::ifstream in(c.taxonomy_path, std::ios::binary);
    if (!in) fail("taxonomy_not_found", "cannot open '" + c.taxonomy_path + "'");
    return SectorTaxonomy::load(in, allowed_sectors(c));
}

GdpSeries load_gdp_file(const RunConfig& c) {
    require_input(c.gdp_path, "gdp_not_found");
    std::ifstream in(c.gdp_path, std::ios::binary);
    if (!in) fail("gdp_not_found", "cannot open '" + c.gdp_path + "'");
    return GdpSeries::load(in);
}

// --- out-dir report emission ---------------------------------------------------

std::string country_list_csv(const json& names) {
    std::string out = "country\n";
    for (const auto& n : names) {
        out += n.get<std::string>();
        out += '\n';
    }
    return out;
}

void emit_ingest_reports(const RunConfig& c, const json& coverage) {
    fs::path out_dir(c.out_dir);
    write_file_atomic(out_dir / "retained.csv", country_list_csv(coverage.at("retained")));
    write_file_atomic(out_dir / "dropped.csv", country_list_csv(coverage.at("dropped")));
    fs::create_directories(out_dir);
    fs::copy_file(cache_rejects_path(c), out_dir / "rejects.csv",
                  fs::copy_options::overwrite_existing);
}

} // namespace

// -----------------------------------------------------------------------------
// RunConfig
// -----------------------------------------------------------------------------

std::vector<std::string> RunConfig::analyzed_sectors() const {
    std::vector<std::string> out = sectors;
    if (out.empty()) {
        out = SectorTaxonomy::default_analyzed_sectors();
        if (include_other) out.push_back("Other");
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void RunConfig::validate() const {
    if (years.first > years.last) {
        fail("bad_year_range", "years " + years_text(years));
    }
    if (analyzed_sectors().empty()) {
        fail("empty_sectors", "at least one sector is required");
    }
    if (min_edge_value < 0.0) {
        fail("bad_min_edge_value", "min_edge_value must be >= 0");
    }
    if (threads < 0) {
        fail("bad_threads", "threads must be >= 0");
    }
    std::vector<std::string> paths;
    for (const std::string& p : {records_path, taxonomy_path, gdp_path}) {
        if (!p.empty()) paths.push_back(p);
    }
    std::sort(paths.begin(), paths.end());
    if (std::adjacent_find(paths.begin(), paths.end()) != paths.end()) {
        fail("paths_not_distinct", "records, taxonomy and gdp paths must differ");
    }
}

// -----------------------------------------------------------------------------
// Record cache
// -----------------------------------------------------------------------------

namespace {

struct CacheTables {
    std::vector<std::string> countries;
    std::vector<std::string> products;
};

class RecordCacheWriter {
public:
    RecordCacheWriter(const fs::path& final_path, YearRange years, CacheTables tables)
        : final_path_(final_path), tmp_path_(final_path.string() + ".tmp"),
          tables_(std::move(tables)) {
        for (uint32_t i = 0; i < tables_.countries.size(); ++i) {
            country_id_.emplace(tables_.countries[i], i);
        }
        for (uint32_t i = 0; i < tables_.products.size(); ++i) {
            product_id_.emplace(tables_.products[i], i);
        }
        fs::create_directories(final_path.parent_path());
        out_.open(tmp_path_, std::ios::binary | std::ios::trunc);
        if (!out_) fail("io_error", "cannot write '" + tmp_path_.string() + "'");
        out_.write(kMagic, sizeof(kMagic));
        put_raw<uint32_t>(out_, static_cast<uint32_t>(years.first));
        put_raw<uint32_t>(out_, static_cast<uint32_t>(years.last));
        put_raw<uint64_t>(out_, tables_.countries.size());
        put_raw<uint64_t>(out_, tables_.products.size());
        put_raw<uint64_t>(out_, 0); // record count, patched in finish()
        for (const auto& c : tables_.countries) put_str(out_, c);
        for (const auto& p : tables_.products) put_str(out_, p);
    }

    // Appends when both countries are present in the table (= retained).
    bool add(const TradeRecord& r) {
        auto a = country_id_.find(r.reporter);
        auto b = country_id_.find(r.partner);
        if (a == country_id_.end() || b == country_id_.end()) return false;
        put_raw<uint32_t>(out_, static_cast<uint32_t>(r.year));
        put_raw<uint32_t>(out_, a->second);
        put_raw<uint32_t>(out_, b->second);
        put_raw<uint32_t>(out_, product_id_.at(r.product));
        put_raw<double>(out_, r.export_value);
        put_raw<double>(out_, r.import_value);
        ++count_;
        return true;
    }

    uint64_t finish() {
        out_.seekp(kRecordCountOffset);
        put_raw<uint64_t>(out_, count_);
        out_.close();
        if (!out_) fail("io_error", "short write to '" + tmp_path_.string() + "'");
        fs::rename(tmp_path_, final_path_);
        return count_;
    }

private:
    fs::path final_path_;
    fs::path tmp_path_;
    CacheTables tables_;
    std::unordered_map<std::string, uint32_t> country_id_;
    std::unordered_map<std::string, uint32_t> product_id_;
    std::ofstream out_;
    uint64_t count_ = 0;
};

} // namespace

void for_each_cached_record(const fs::path& cache_file,
                            const std::function<void(const TradeRecord&)>& fn) {
    std::ifstream in(cache_file, std::ios::binary);
    if (!in) fail("io_error", "cannot open '" + cache_file.string() + "'");
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        fail("cache_corrupt", "'" + cache_file.string() + "' is not a record cache");
    }
    get_raw<uint32_t>(in); // year_first
    get_raw<uint32_t>(in); // year_last
    uint64_t n_countries = get_raw<uint64_t>(in);
    uint64_t n_products = get_raw<uint64_t>(in);
    uint64_t n_records = get_raw<uint64_t>(in);
    std::vector<std::string> countries(n_countries);
    for (auto& c : countries) c = get_str(in);
    std::vector<std::string> products(n_products);
    for (auto& p : products) p = get_str(in);

    TradeRecord record;
    for (uint64_t i = 0; i < n_records; ++i) {
        record.year = static_cast<int>(get_raw<uint32_t>(in));
        record.reporter = countries.at(get_raw<uint32_t>(in));
        record.partner = countries.at(get_raw<uint32_t>(in));
        record.product = products.at(get_raw<uint32_t>(in));
        record.export_value = get_raw<double>(in);
        record.import_value = get_raw<double>(in);
        if (!in) fail("cache_corrupt", "'" + cache_file.string() + "' is truncated");
        fn(record);
    }
}

fs::path graph_dump_path(const RunConfig& config, const std::string& sector, int year) {
    return fs::path(config.cache_dir) / "graphs" /
           (sanitize_for_filename(sector) + "_" + std::to_string(year) + ".csv");
}

// -----------------------------------------------------------------------------
// cmd_ingest
// -----------------------------------------------------------------------------

IngestSummary cmd_ingest(const RunConfig& config) {
    config.validate();
    require_input(config.records_path, "records_not_found");
    load_taxonomy_file(config); // fail fast on bad companion inputs
    load_gdp_file(config);

    const std::string key = ingest_key(config);
    json manifest = load_manifest(config);

    if (manifest.contains("ingest") && manifest["ingest"].value("key", "") == key &&
        fs::exists(records_bin_path(config)) && fs::exists(coverage_path(config)) &&
        fs::exists(cache_rejects_path(config)) &&
        manifest["ingest"].value("records_bin_hash", "") ==
            to_hex(hash_file(records_bin_path(config)))) {
        const json& e = manifest["ingest"];
        json coverage = json::parse(read_file(coverage_path(config)));
        emit_ingest_reports(config, coverage);
        IngestSummary s;
        s.observed_countries = e.value("observed_countries", uint64_t{0});
        s.retained = e.value("retained", uint64_t{0});
        s.dropped = e.value("dropped", uint64_t{0});
        s.rows = e.value("rows", uint64_t{0});
        s.records_parsed = e.value("records_parsed", uint64_t{0});
        s.rejects = e.value("rejects", uint64_t{0});
        s.records_cached = e.value("records_cached", uint64_t{0});
        s.cache_hit = true;
        return s;
    }

    // Pass 1: coverage + product table + rejects.
    fs::create_directories(config.cache_dir);
    fs::path rejects_tmp = cache_rejects_path(config);
    rejects_tmp += ".tmp";
    std::ofstream rejects_out(rejects_tmp, std::ios::binary | std::ios::trunc);
    if (!rejects_out) fail("io_error", "cannot write '" + rejects_tmp.string() + "'");
    rejects_out << "line_number,reason,raw_row\n";

    CoverageAccumulator cov(config.years);
    std::set<std::string> products;
    ParseStats stats;
    {
        std::ifstream in(config.records_path, std::ios::binary);
        if (!in) fail("records_not_found", "cannot open '" + config.records_path + "'");
        stats = parse_trade_records(
            in, config.format,
            [&](TradeRecord&& r) {
                cov.observe(r);
                products.insert(std::move(r.product));
            },
            [&](const Reject& r) {
                rejects_out << r.line_number << ',' << r.reason << ',' << r.raw << '\n';
            });
    }
    rejects_out.close();
    if (!rejects_out) fail("io_error", "short write to '" + rejects_tmp.string() + "'");
    fs::rename(rejects_tmp, cache_rejects_path(config));

    CoverageFilterResult coverage = cov.finish();

    // Pass 2: write the filtered record cache.
    CacheTables tables;
    tables.countries.assign(coverage.retained.begin(), coverage.retained.end());
    tables.products.assign(products.begin(), products.end());
    RecordCacheWriter writer(records_bin_path(config), config.years, std::move(tables));
    uint64_t cached = 0;
    {
        std::ifstream in(config.records_path, std::ios::binary);
        if (!in) fail("records_not_found", "cannot open '" + config.records_path + "'");
        parse_trade_records(
            in, config.format,
            [&](TradeRecord&& r) {
                if (writer.add(r)) ++cached;
            },
            [](const Reject&) {});
    }
    writer.finish();

    json cov_json;
    cov_json["retained"] = json::array();
    for (const auto& c : coverage.retained) cov_json["retained"].push_back(c);
    cov_json["dropped"] = json::array();
    for (const auto& c : coverage.dropped) cov_json["dropped"].push_back(c);
    write_file_atomic(coverage_path(config), cov_json.dump(2) + "\n");

    IngestSummary s;
    s.observed_countries = coverage.retained.size() + coverage.dropped.size();
    s.retained = coverage.retained.size();
    s.dropped = coverage.dropped.size();
    s.rows = stats.rows;
    s.records_parsed = stats.records;
    s.rejects = stats.rejects;
    s.records_cached = cached;
    s.cache_hit = false;

    json entry;
    entry["key"] = key;
    entry["records_bin_hash"] = to_hex(hash_file(records_bin_path(config)));
    entry["observed_countries"] = s.observed_countries;
    entry["retained"] = s.retained;
    entry["dropped"] = s.dropped;
    entry["rows"] = s.rows;
    entry["records_parsed"] = s.records_parsed;
    entry["rejects"] = s.rejects;
    entry["records_cached"] = s.records_cached;
    manifest["ingest"] = entry;
    manifest.erase("build"); // downstream entries are now stale
    save_manifest(config, manifest);

    emit_ingest_reports(config, cov_json);
    return s;
}

// -----------------------------------------------------------------------------
// cmd_build
// -----------------------------------------------------------------------------

namespace {

// Requires a manifest ingest entry that matches the current config and an
// intact records.bin; returns its recorded hash.
std::string require_ingest_cache(const RunConfig& config, const json& manifest) {
    if (!manifest.contains("ingest")) {
        fail("ingest_required", "no ingest cache; run ingest first");
    }
    const json& e = manifest["ingest"];
    if (e.value("key", "") != ingest_key(config)) {
        fail("ingest_required", "ingest cache is stale for the current inputs/config");
    }
    if (!fs::exists(records_bin_path(config))) {
        fail("ingest_required", "record cache file is missing");
    }
    std::string recorded = e.value("records_bin_hash", "");
    if (recorded != to_hex(hash_file(records_bin_path(config)))) {
        fail("ingest_required", "record cache file does not match the manifest");
    }
    return recorded;
}

std::string combined_graphs_hash(const RunConfig& config,
                                 const std::vector<std::pair<std::string, int>>& cells) {
    Fnv64 h;
    for (const auto& [sector, year] : cells) {
        fs::path p = graph_dump_path(config, sector, year);
        if (!fs::exists(p)) return "";
        h.update(p.filename().string());
        h.update("=");
        h.update(to_hex(hash_file(p)));
        h.update("\n");
    }
    return to_hex(h.digest());
}

std::vector<std::pair<std::string, int>> cell_list(const RunConfig& config) {
    std::vector<std::pair<std::string, int>> cells;
    for (const std::string& sector : config.analyzed_sectors()) {
        for (int year = config.years.first; year <= config.years.last; ++year) {
            cells.emplace_back(sector, year);
        }
    }
    return cells;
}

} // namespace

BuildSummary cmd_build(const RunConfig& config) {
    config.validate();
    json manifest = load_manifest(config);
    std::string records_hash = require_ingest_cache(config, manifest);
    SectorTaxonomy taxonomy = load_taxonomy_file(config);

    const std::string key = build_key(config, records_hash);
    auto cells = cell_list(config);

    if (manifest.contains("build") && manifest["build"].value("key", "") == key &&
        manifest["build"].value("graphs_hash", "") == combined_graphs_hash(config, cells) &&
        !manifest["build"].value("graphs_hash", "").empty()) {
        BuildSummary s;
        s.graphs_written = manifest["build"].value("graphs_written", uint64_t{0});
        s.unknown_product_records = manifest["build"].value("unknown_product_records", uint64_t{0});
        s.cache_hit = true;
        return s;
    }

    // Read the coverage tables back; retained countries are exactly the
    // cache's country table.
    json coverage = json::parse(read_file(coverage_path(config)));
    std::set<std::string> retained;
    for (const auto& c : coverage.at("retained")) retained.insert(c.get<std::string>());

    GraphBatch batch(taxonomy, config.analyzed_sectors(), config.years, retained,
                     config.min_edge_value);
    for_each_cached_record(records_bin_path(config),
                           [&](const TradeRecord& r) { batch.add(r); });
    auto graphs = batch.finish();

    // dumps from any previous configuration are stale now
    fs::remove_all(fs::path(config.cache_dir) / "graphs");

    std::vector<const TradeGraph*> ordered;
    ordered.reserve(graphs.size());
    for (const auto& [cell, graph] : graphs) ordered.push_back(&graph);
    parallel_for(ordered.size(), config.threads, [&](size_t i) {
        const TradeGraph& g = *ordered[i];
        write_file_atomic(graph_dump_path(config, g.sector, g.year), format_graph_dump(g));
    });

    BuildSummary s;
    s.graphs_written = graphs.size();
    s.unknown_product_records = batch.tally().unknown_product_records;
    s.cache_hit = false;

    json entry;
    entry["key"] = key;
    entry["graphs_written"] = s.graphs_written;
    entry["unknown_product_records"] = s.unknown_product_records;
    entry["graphs_hash"] = combined_graphs_hash(config, cells);
    manifest["build"] = entry;
    save_manifest(config, manifest);
    return s;
}

// -----------------------------------------------------------------------------
// cmd_report
// -----------------------------------------------------------------------------

namespace {

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
    std::string out = "sector,year,nodes,avg_degree,avg_clustering,density,triangles,diameter,components\n";
    for (const MetricsRow& r : rows) {
        out += r.sector;
        out += ',';
        out += std::to_string(r.year);
        out += ',';
        out += std::to_string(r.node_count);
        out += ',';
        out += fmt_g12(r.average_degree);
        out += ',';
        out += fmt_g12(r.average_clustering);
        out += ',';
        out += fmt_g12(r.density);
        out += ',';
        out += std::to_string(r.triangle_count);
        out += ',';
        if (r.diameter) out += std::to_string(*r.diameter);
        out += ',';
        out += std::to_string(r.component_count);
        out += '\n';
    }
    return out;
}

const std::array<std::string_view, 6> kCorrelationColumns = {
    "avg_degree", "avg_clustering", "density", "triangles", "nodes", "diameter"};

std::string correlations_csv(const CorrelationReport& report) {
    std::string out = "sector";
    for (auto m : kCorrelationColumns) {
        out += ',';
        out += m;
        out += "_r";
    }
    out += '\n';
    for (const auto& [sector, cells] : report.rows) {
        out += sector;
        for (auto m : kCorrelationColumns) {
            out += ',';
            const CorrelationCell& cell = cells.at(std::string(m));
            if (cell.r) out += fmt_fixed3(*cell.r);
        }
        out += '\n';
    }
    return out;
}

std::string correlations_json(const CorrelationReport& report) {
    json j;
    j["year_range"] = {{"first", report.year_range.first}, {"last", report.year_range.last}};
    json sectors = json::object();
    for (const auto& [sector, cells] : report.rows) {
        json row = json::object();
        for (const auto& [metric, cell] : cells) {
            if (cell.r) {
                row[metric] = {{"r", *cell.r}};
            } else {
                row[metric] = {{"undefined", cell.note}};
            }
        }
        sectors[sector] = row;
    }
    j["sectors"] = sectors;
    return j.dump(2) + "\n";
}

std::string volume_csv(const VolumeSeries& v, YearRange years) {
    std::string out =
        "year,avg_change,avg_pct_change,avg_pct_change_excl_outliers,zero_denominator_count\n";
    for (int year = years.first + 1; year <= years.last; ++year) {
        out += std::to_string(year);
        out += ',';
        if (auto it = v.avg_change.find(year); it != v.avg_change.end()) {
            out += fmt_g12(it->second);
        }
        out += ',';
        if (auto it = v.avg_pct_change.find(year); it != v.avg_pct_change.end()) {
            out += fmt_g12(it->second);
        }
        out += ',';
        if (auto it = v.avg_pct_change_excl_outliers.find(year);
            it != v.avg_pct_change_excl_outliers.end()) {
            out += fmt_g12(it->second);
        }
        out += ',';
        uint64_t zeros = 0;
        if (auto it = v.zero_denominator_count.find(year); it != v.zero_denominator_count.end()) {
            zeros = it->second;
        }
        out += std::to_string(zeros);
        out += '\n';
    }
    return out;
}

std::string outliers_csv(const VolumeSeries& v) {
    std::string out = "country,year,pct_change\n";
    for (const auto& o : v.outliers) {
        out += o.country;
        out += ',';
        out += std::to_string(o.year);
        out += ',';
        out += fmt_g12(o.pct_change);
        out += '\n';
    }
    return out;
}

std::string fig_csv(const std::vector<MetricsRow>& rows, std::string_view metric,
                    const std::vector<std::string>& sectors) {
    std::set<int> years;
    std::map<std::pair<std::string, int>, const MetricsRow*> by_cell;
    for (const MetricsRow& r : rows) {
        years.insert(r.year);
        by_cell[{r.sector, r.year}] = &r;
    }
    std::string out = "year";
    for (const auto& s : sectors) {
        out += ',';
        out += s;
    }
    out += '\n';
    for (int year : years) {
        out += std::to_string(year);
        for (const auto& s : sectors) {
            out += ',';
            auto it = by_cell.find({s, year});
            if (it != by_cell.end()) {
                if (auto v = metric_value(*it->second, metric)) out += fmt_g12(*v);
            }
        }
        out += '\n';
    }
    return out;
}

} // namespace

ReportSummary cmd_report(const RunConfig& config) {
    config.validate();
    json manifest = load_manifest(config);
    std::string records_hash = require_ingest_cache(config, manifest);

    auto cells = cell_list(config);
    const std::string key = build_key(config, records_hash);
    if (!manifest.contains("build") || manifest["build"].value("key", "") != key) {
        fail("build_required", "no graph cache for the current config; run build first");
    }
    std::string graphs_hash = combined_graphs_hash(config, cells);
    if (graphs_hash.empty() || manifest["build"].value("graphs_hash", "") != graphs_hash) {
        fail("build_required", "graph cache does not match the manifest");
    }

    GdpSeries gdp = load_gdp_file(config);

    // Metrics per cell, computed in parallel into fixed slots.
    std::vector<MetricsRow> rows(cells.size());
    parallel_for(cells.size(), config.threads, [&](size_t i) {
        const auto& [sector, year] = cells[i];
        TradeGraph g = parse_graph_dump(read_file(graph_dump_path(config, sector, year)), sector,
                                        year);
        rows[i] = compute_metrics_row(g);
    });

    CorrelationReport correlations = correlate_all(rows, gdp, config.years);

    VolumeAccumulator vol;
    for_each_cached_record(records_bin_path(config), [&](const TradeRecord& r) { vol.add(r); });
    VolumeSeries volume = vol.finish(config.years, config.outlier_rule);

    fs::path out_dir(config.out_dir);
    write_file_atomic(out_dir / "metrics.csv", metrics_csv(rows));
    write_file_atomic(out_dir / "correlations.csv", correlations_csv(correlations));
    write_file_atomic(out_dir / "correlations.json", correlations_json(correlations));
    write_file_atomic(out_dir / "volume.csv", volume_csv(volume, config.years));
    write_file_atomic(out_dir / "outliers.csv", outliers_csv(volume));
    for (auto metric : kMetricNames) {
        write_file_atomic(out_dir / ("fig_" + std::string(metric) + ".csv"),
                          fig_csv(rows, metric, config.analyzed_sectors()));
    }

    ReportSummary s;
    s.metrics_rows = rows.size();
    for (const auto& [sector, cells_map] : correlations.rows) {
        for (const auto& [metric, cell] : cells_map) {
            ++s.correlation_cells;
            if (!cell.r) ++s.undefined_cells;
        }
    }
    s.volume_years = volume.avg_change.size();
    s.outliers = volume.outliers.size();
    return s;
}

} // namespace tradenet

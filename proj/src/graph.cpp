#include "tradenet/graph.hpp"

#include "tradenet/csv.hpp"
#include "tradenet/error.hpp"

#include <algorithm>

namespace tradenet {

GraphBatch::GraphBatch(const SectorTaxonomy& taxonomy, std::vector<std::string> sectors,
                       YearRange years, const std::set<std::string>& retained_countries,
                       double min_edge_value)
    : sectors_(std::move(sectors)), years_(years), min_edge_value_(min_edge_value) {
    if (sectors_.empty()) {
        fail("empty_sectors", "at least one sector is required");
    }
    if (years_.first > years_.last) {
        fail("bad_year_range", "year range is empty");
    }
    if (min_edge_value_ < 0.0) {
        fail("bad_min_edge_value", "min_edge_value must be >= 0");
    }
    for (const std::string& s : sectors_) {
        if (!taxonomy.sectors().contains(s)) {
            fail("unknown_sector", "sector '" + s + "' has no products in the taxonomy");
        }
    }

    countries_.assign(retained_countries.begin(), retained_countries.end());
    country_id_.reserve(countries_.size());
    for (uint32_t i = 0; i < countries_.size(); ++i) {
        country_id_.emplace(countries_[i], i);
    }

    // Requested sectors get a cell index; products of other sectors are
    // known but skipped, distinct from unknown products.
    std::unordered_map<std::string, uint32_t> sector_index;
    for (uint32_t i = 0; i < sectors_.size(); ++i) sector_index.emplace(sectors_[i], i);
    product_sector_.reserve(taxonomy.entries().size());
    for (const auto& [product, sector] : taxonomy.entries()) {
        auto it = sector_index.find(sector);
        product_sector_.emplace(product, it == sector_index.end() ? kSkip : it->second);
    }

    cells_.resize(sectors_.size() * static_cast<size_t>(years_.span()));
}

void GraphBatch::add(const TradeRecord& record) {
    if (!years_.contains(record.year)) return;
    auto ps = product_sector_.find(record.product);
    if (ps == product_sector_.end()) {
        ++tally_.unknown_product_records;
        return;
    }
    if (ps->second == kSkip) return;
    auto a = country_id_.find(record.reporter);
    auto b = country_id_.find(record.partner);
    if (a == country_id_.end() || b == country_id_.end()) return;
    uint32_t lo = std::min(a->second, b->second);
    uint32_t hi = std::max(a->second, b->second);
    if (lo == hi) return; // self-trade; rejected upstream but never forms an edge

    size_t cell = static_cast<size_t>(ps->second) * static_cast<size_t>(years_.span()) +
                  static_cast<size_t>(record.year - years_.first);
    cells_[cell][(uint64_t{lo} << 32) | hi].add(record.export_value + record.import_value);
    ++tally_.aggregated_records;
}

std::map<std::pair<std::string, int>, TradeGraph> GraphBatch::finish() const {
    std::map<std::pair<std::string, int>, TradeGraph> out;
    for (uint32_t s = 0; s < sectors_.size(); ++s) {
        for (int year = years_.first; year <= years_.last; ++year) {
            const auto& pairs =
                cells_[static_cast<size_t>(s) * static_cast<size_t>(years_.span()) +
                       static_cast<size_t>(year - years_.first)];

            // Qualifying edges in global-id order; global id order is
            // lexicographic country-code order by construction.
            std::vector<std::pair<uint64_t, double>> edges;
            edges.reserve(pairs.size());
            for (const auto& [key, sum] : pairs) {
                double weight = sum.value();
                if (weight > min_edge_value_) edges.emplace_back(key, weight);
            }
            std::sort(edges.begin(), edges.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });

            std::vector<uint32_t> node_ids;
            node_ids.reserve(edges.size() * 2);
            for (const auto& [key, weight] : edges) {
                node_ids.push_back(static_cast<uint32_t>(key >> 32));
                node_ids.push_back(static_cast<uint32_t>(key & 0xffffffffu));
            }
            std::sort(node_ids.begin(), node_ids.end());
            node_ids.erase(std::unique(node_ids.begin(), node_ids.end()), node_ids.end());

            TradeGraph graph;
            graph.sector = sectors_[s];
            graph.year = year;
            graph.nodes.reserve(node_ids.size());
            for (uint32_t id : node_ids) graph.nodes.push_back(countries_[id]);
            graph.edges.reserve(edges.size());
            auto local = [&](uint32_t id) {
                return static_cast<uint32_t>(
                    std::lower_bound(node_ids.begin(), node_ids.end(), id) - node_ids.begin());
            };
            for (const auto& [key, weight] : edges) {
                graph.edges.push_back(TradeGraph::Edge{local(static_cast<uint32_t>(key >> 32)),
                                                       local(static_cast<uint32_t>(key & 0xffffffffu)),
                                                       weight});
            }
            out.emplace(std::make_pair(graph.sector, year), std::move(graph));
        }
    }
    return out;
}

TradeGraph build_graph(std::span<const TradeRecord> records, const SectorTaxonomy& taxonomy,
                       const std::string& sector, int year,
                       const std::set<std::string>& retained_countries, double min_edge_value,
                       BuildTally* tally) {
    GraphBatch batch(taxonomy, {sector}, YearRange{year, year}, retained_countries,
                     min_edge_value);
    for (const TradeRecord& r : records) batch.add(r);
    if (tally) *tally = batch.tally();
    auto graphs = batch.finish();
    return std::move(graphs.begin()->second);
}

std::map<std::pair<std::string, int>, TradeGraph>
build_all(std::span<const TradeRecord> records, const SectorTaxonomy& taxonomy, YearRange years,
          const std::vector<std::string>& sectors, const std::set<std::string>& retained_countries,
          double min_edge_value, BuildTally* tally) {
    GraphBatch batch(taxonomy, sectors, years, retained_countries, min_edge_value);
    for (const TradeRecord& r : records) batch.add(r);
    if (tally) *tally = batch.tally();
    return batch.finish();
}

std::string format_graph_dump(const TradeGraph& graph) {
    std::string out;
    for (const auto& edge : graph.edges) {
        out += graph.nodes[edge.a];
        out += ',';
        out += graph.nodes[edge.b];
        out += ',';
        out += fmt_g12(edge.weight);
        out += '\n';
    }
    return out;
}

TradeGraph parse_graph_dump(std::string_view text, std::string sector, int year) {
    TradeGraph graph;
    graph.sector = std::move(sector);
    graph.year = year;

    struct RawEdge {
        std::string a, b;
        double weight;
    };
    std::vector<RawEdge> raw;
    size_t pos = 0;
    std::vector<std::string_view> fields;
    while (pos < text.size()) {
        size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                                              : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        if (line.empty()) continue;
        split_fields(line, ',', fields);
        if (fields.size() != 3) {
            fail("graph_dump_parse", "bad edge line '" + std::string(line) + "'");
        }
        auto weight = parse_double(fields[2]);
        if (!weight) {
            fail("graph_dump_parse", "bad weight in '" + std::string(line) + "'");
        }
        raw.push_back(RawEdge{std::string(fields[0]), std::string(fields[1]), *weight});
    }

    std::vector<std::string> nodes;
    nodes.reserve(raw.size() * 2);
    for (const auto& e : raw) {
        nodes.push_back(e.a);
        nodes.push_back(e.b);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    graph.nodes = std::move(nodes);

    auto index = [&](const std::string& code) {
        return static_cast<uint32_t>(
            std::lower_bound(graph.nodes.begin(), graph.nodes.end(), code) - graph.nodes.begin());
    };
    graph.edges.reserve(raw.size());
    for (const auto& e : raw) {
        uint32_t a = index(e.a);
        uint32_t b = index(e.b);
        graph.edges.push_back(TradeGraph::Edge{std::min(a, b), std::max(a, b), e.weight});
    }
    std::sort(graph.edges.begin(), graph.edges.end(), [](const auto& x, const auto& y) {
        return std::pair(x.a, x.b) < std::pair(y.a, y.b);
    });
    return graph;
}

} // namespace tradenet

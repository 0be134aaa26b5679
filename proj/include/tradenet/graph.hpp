#pragma once

#include "tradenet/ingest.hpp"
#include "tradenet/util.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace tradenet {

// Simple undirected graph of countries for one (sector, year). Nodes are
// exactly the endpoints of qualifying edges, sorted lexicographically;
// edges hold local node indices with a < b, sorted by (a, b). Weights are
// the aggregated pair trade values, kept for thresholding diagnostics.
struct TradeGraph {
    std::string sector;
    int year = 0;
    std::vector<std::string> nodes;

    struct Edge {
        uint32_t a = 0;
        uint32_t b = 0;
        double weight = 0.0;
        bool operator==(const Edge&) const = default;
    };
    std::vector<Edge> edges;

    size_t node_count() const { return nodes.size(); }
    size_t edge_count() const { return edges.size(); }
    bool operator==(const TradeGraph&) const = default;
};

struct BuildTally {
    uint64_t unknown_product_records = 0; // product absent from taxonomy
    uint64_t aggregated_records = 0;      // records that reached a cell
};

// Streaming aggregator for every (sector, year) cell at once. Pure function
// of the record multiset: per-pair values use compensated summation, node
// and edge order are canonical.
class GraphBatch {
public:
    GraphBatch(const SectorTaxonomy& taxonomy, std::vector<std::string> sectors, YearRange years,
               const std::set<std::string>& retained_countries, double min_edge_value);

    void add(const TradeRecord& record);

    // Exactly |sectors| x |years| entries, including empty graphs.
    std::map<std::pair<std::string, int>, TradeGraph> finish() const;

    const BuildTally& tally() const { return tally_; }

private:
    std::vector<std::string> sectors_;
    YearRange years_;
    double min_edge_value_;
    std::vector<std::string> countries_;                 // sorted; index = country id
    std::unordered_map<std::string, uint32_t> country_id_;
    std::unordered_map<std::string, uint32_t> product_sector_; // requested-sector index or kSkip
    std::vector<std::unordered_map<uint64_t, NeumaierSum>> cells_;
    BuildTally tally_;

    static constexpr uint32_t kSkip = UINT32_MAX;
};

// An edge exists iff the aggregate pair value (exports + imports over all
// qualifying records, both directions merged) is strictly greater than
// min_edge_value; the default 0 means "any positive trade".
TradeGraph build_graph(std::span<const TradeRecord> records, const SectorTaxonomy& taxonomy,
                       const std::string& sector, int year,
                       const std::set<std::string>& retained_countries,
                       double min_edge_value = 0.0, BuildTally* tally = nullptr);

std::map<std::pair<std::string, int>, TradeGraph>
build_all(std::span<const TradeRecord> records, const SectorTaxonomy& taxonomy, YearRange years,
          const std::vector<std::string>& sectors, const std::set<std::string>& retained_countries,
          double min_edge_value = 0.0, BuildTally* tally = nullptr);

// Edge-list dump: "country_a,country_b,weight" rows sorted lexicographically
// by (a, b). parse_graph_dump reconstructs the graph from such text.
std::string format_graph_dump(const TradeGraph& graph);
TradeGraph parse_graph_dump(std::string_view text, std::string sector, int year);

} // namespace tradenet

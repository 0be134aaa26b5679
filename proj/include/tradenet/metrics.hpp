#pragma once

#include "tradenet/graph.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tradenet {

// The six graph attributes for one (sector, year), plus the component count
// so disconnected-diameter results are visible. diameter is absent only for
// the empty graph.
struct MetricsRow {
    std::string sector;
    int year = 0;
    uint64_t node_count = 0;
    double average_degree = 0.0;
    double average_clustering = 0.0;
    double density = 0.0;
    uint64_t triangle_count = 0;
    std::optional<int> diameter;
    uint64_t component_count = 0;

    bool operator==(const MetricsRow&) const = default;
};

inline constexpr std::array<std::string_view, 6> kMetricNames = {
    "nodes", "avg_degree", "avg_clustering", "density", "triangles", "diameter"};

// nullopt for an absent diameter; throws unknown_metric for a bad name.
std::optional<double> metric_value(const MetricsRow& row, std::string_view metric);

// Dense bit-matrix adjacency over a graph's local node indices; rows feed
// the AND+popcount and bitset-BFS kernels.
class AdjacencyBits {
public:
    explicit AdjacencyBits(const TradeGraph& graph);

    size_t size() const { return n_; }
    size_t words_per_row() const { return words_; }
    const uint64_t* row(size_t v) const { return bits_.data() + v * words_; }
    uint32_t degree(size_t v) const { return degrees_[v]; }

private:
    size_t n_;
    size_t words_;
    std::vector<uint64_t> bits_;
    std::vector<uint32_t> degrees_;
};

double average_degree(const TradeGraph& graph); // 2|E|/|V|; 0 for the empty graph
double density(const TradeGraph& graph);        // 2|E|/(|V|(|V|-1)); 0 for |V| <= 1

// Fraction of v's neighbor pairs that are adjacent; 0 when deg(v) < 2.
// Throws node_not_in_graph.
double local_clustering(const TradeGraph& graph, std::string_view country);

// Mean of local clustering over all nodes (degree < 2 nodes contribute 0);
// 0 for the empty graph.
double average_clustering(const TradeGraph& graph);

uint64_t triangle_count(const TradeGraph& graph);

// Diameter of the largest connected component (ties: the max over all
// largest components), plus the total component count. Throws empty_graph.
std::pair<int, uint64_t> diameter(const TradeGraph& graph);

MetricsRow compute_metrics_row(const TradeGraph& graph);

} // namespace tradenet

#include "tradenet/metrics.hpp"

#include "tradenet/error.hpp"
#include "tradenet/kernels.hpp"

#include <algorithm>
#include <bit>

namespace tradenet {

namespace {

// Enumerate set bits of a row, calling fn(index).
template <typename Fn>
void for_each_bit(const uint64_t* words, size_t nwords, Fn&& fn) {
    for (size_t w = 0; w < nwords; ++w) {
        uint64_t bits = words[w];
        while (bits != 0) {
            unsigned b = static_cast<unsigned>(std::countr_zero(bits));
            fn(w * 64 + b);
            bits &= bits - 1;
        }
    }
}

bool all_zero(const uint64_t* words, size_t nwords) {
    for (size_t w = 0; w < nwords; ++w) {
        if (words[w] != 0) return false;
    }
    return true;
}

// Edges among v's neighbors, each counted once.
uint64_t neighbor_edge_count(const AdjacencyBits& adj, size_t v) {
    uint64_t twice = 0;
    const uint64_t* rv = adj.row(v);
    for_each_bit(rv, adj.words_per_row(), [&](size_t u) {
        twice += kernels::and_popcount(rv, adj.row(u), adj.words_per_row());
    });
    return twice / 2;
}

double local_clustering_at(const AdjacencyBits& adj, size_t v) {
    uint32_t d = adj.degree(v);
    if (d < 2) return 0.0;
    uint64_t t = neighbor_edge_count(adj, v);
    return 2.0 * static_cast<double>(t) / (static_cast<double>(d) * (d - 1));
}

// BFS over bit rows; returns the eccentricity of `start` and marks every
// node of its component in `component`.
int bfs_eccentricity(const AdjacencyBits& adj, size_t start, std::vector<uint64_t>& visited,
                     std::vector<uint64_t>& frontier, std::vector<uint64_t>& next) {
    const size_t words = adj.words_per_row();
    std::fill(visited.begin(), visited.end(), 0);
    std::fill(frontier.begin(), frontier.end(), 0);
    visited[start / 64] |= uint64_t{1} << (start % 64);
    frontier[start / 64] |= uint64_t{1} << (start % 64);
    int ecc = 0;
    for (;;) {
        std::fill(next.begin(), next.end(), 0);
        for_each_bit(frontier.data(), words, [&](size_t u) {
            kernels::or_accumulate(next.data(), adj.row(u), words);
        });
        kernels::andnot_inplace(next.data(), visited.data(), words);
        if (all_zero(next.data(), words)) break;
        kernels::or_accumulate(visited.data(), next.data(), words);
        frontier.swap(next);
        ++ecc;
    }
    return ecc;
}

} // namespace

AdjacencyBits::AdjacencyBits(const TradeGraph& graph)
    : n_(graph.node_count()), words_((graph.node_count() + 63) / 64) {
    bits_.assign(n_ * words_, 0);
    degrees_.assign(n_, 0);
    for (const auto& e : graph.edges) {
        bits_[e.a * words_ + e.b / 64] |= uint64_t{1} << (e.b % 64);
        bits_[e.b * words_ + e.a / 64] |= uint64_t{1} << (e.a % 64);
        ++degrees_[e.a];
        ++degrees_[e.b];
    }
}

double average_degree(const TradeGraph& graph) {
    if (graph.node_count() == 0) return 0.0;
    return 2.0 * static_cast<double>(graph.edge_count()) /
           static_cast<double>(graph.node_count());
}

double density(const TradeGraph& graph) {
    size_t n = graph.node_count();
    if (n <= 1) return 0.0;
    return 2.0 * static_cast<double>(graph.edge_count()) /
           (static_cast<double>(n) * static_cast<double>(n - 1));
}

double local_clustering(const TradeGraph& graph, std::string_view country) {
    auto it = std::lower_bound(graph.nodes.begin(), graph.nodes.end(), country);
    if (it == graph.nodes.end() || *it != country) {
        fail("node_not_in_graph", "country '" + std::string(country) + "' is not a node");
    }
    AdjacencyBits adj(graph);
    return local_clustering_at(adj, static_cast<size_t>(it - graph.nodes.begin()));
}

double average_clustering(const TradeGraph& graph) {
    size_t n = graph.node_count();
    if (n == 0) return 0.0;
    AdjacencyBits adj(graph);
    double sum = 0.0; // sequential in node order; keeps printed values stable
    for (size_t v = 0; v < n; ++v) {
        sum += local_clustering_at(adj, v);
    }
    return sum / static_cast<double>(n);
}

uint64_t triangle_count(const TradeGraph& graph) {
    AdjacencyBits adj(graph);
    const size_t words = adj.words_per_row();
    uint64_t total = 0;
    // For edge (a, b) with a < b, count common neighbors w > b: each
    // triangle {a < b < w} is counted exactly once, at its smallest edge.
    for (const auto& e : graph.edges) {
        const uint64_t* ra = adj.row(e.a);
        const uint64_t* rb = adj.row(e.b);
        size_t first_bit = static_cast<size_t>(e.b) + 1;
        size_t w0 = first_bit / 64;
        unsigned shift = static_cast<unsigned>(first_bit % 64);
        if (w0 >= words) continue;
        total += static_cast<uint64_t>(std::popcount((ra[w0] & rb[w0]) >> shift));
        total += kernels::and_popcount(ra + w0 + 1, rb + w0 + 1, words - w0 - 1);
    }
    return total;
}

std::pair<int, uint64_t> diameter(const TradeGraph& graph) {
    const size_t n = graph.node_count();
    if (n == 0) {
        fail("empty_graph", "diameter is undefined for the empty graph");
    }
    AdjacencyBits adj(graph);
    const size_t words = adj.words_per_row();

    // Component labelling by BFS sweep.
    std::vector<uint32_t> component(n, UINT32_MAX);
    std::vector<size_t> component_size;
    std::vector<uint64_t> visited(words), frontier(words), next(words);
    for (size_t v = 0; v < n; ++v) {
        if (component[v] != UINT32_MAX) continue;
        uint32_t id = static_cast<uint32_t>(component_size.size());
        bfs_eccentricity(adj, v, visited, frontier, next);
        size_t size = 0;
        for_each_bit(visited.data(), words, [&](size_t u) {
            component[u] = id;
            ++size;
        });
        component_size.push_back(size);
    }

    size_t largest = *std::max_element(component_size.begin(), component_size.end());
    int diam = 0;
    for (size_t v = 0; v < n; ++v) {
        if (component_size[component[v]] != largest) continue;
        diam = std::max(diam, bfs_eccentricity(adj, v, visited, frontier, next));
    }
    return {diam, component_size.size()};
}

MetricsRow compute_metrics_row(const TradeGraph& graph) {
    MetricsRow row;
    row.sector = graph.sector;
    row.year = graph.year;
    row.node_count = graph.node_count();
    row.average_degree = average_degree(graph);
    row.density = density(graph);

    if (graph.node_count() == 0) {
        return row; // degenerate conventions: zeros, diameter absent
    }

    row.average_clustering = average_clustering(graph);
    row.triangle_count = triangle_count(graph);
    auto [diam, components] = diameter(graph);
    row.diameter = diam;
    row.component_count = components;
    return row;
}

std::optional<double> metric_value(const MetricsRow& row, std::string_view metric) {
    if (metric == "nodes") return static_cast<double>(row.node_count);
    if (metric == "avg_degree") return row.average_degree;
    if (metric == "avg_clustering") return row.average_clustering;
    if (metric == "density") return row.density;
    if (metric == "triangles") return static_cast<double>(row.triangle_count);
    if (metric == "diameter") {
        if (!row.diameter) return std::nullopt;
        return static_cast<double>(*row.diameter);
    }
    fail("unknown_metric", "no metric named '" + std::string(metric) + "'");
}

} // namespace tradenet

#pragma once

// Shared helpers for the test binaries: deterministic RNG, graph builders,
// scratch-directory management and file comparison.

#include "tradenet/graph.hpp"
#include "tradenet/ingest.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace testutil {

// splitmix64: tiny, portable, stable across platforms and library versions.
struct Rng {
    uint64_t state;

    explicit Rng(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, bound)
    uint64_t below(uint64_t bound) { return next() % bound; }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

inline std::filesystem::path fixtures_dir() { return TRADENET_FIXTURES_DIR; }

inline std::filesystem::path fresh_scratch(const std::string& name) {
    std::filesystem::path dir = std::filesystem::path(TRADENET_SCRATCH_DIR) / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string node_name(size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "N%03zu", i);
    return buf;
}

// Unweighted graph with nodes N000..N(n-1) and the given local-index edges.
inline tradenet::TradeGraph make_graph(size_t n,
                                       std::vector<std::pair<uint32_t, uint32_t>> edges) {
    tradenet::TradeGraph g;
    g.sector = "Test";
    g.year = 2000;
    for (size_t i = 0; i < n; ++i) g.nodes.push_back(node_name(i));
    for (auto [a, b] : edges) {
        g.edges.push_back({std::min(a, b), std::max(a, b), 1.0});
    }
    std::sort(g.edges.begin(), g.edges.end(),
              [](const auto& x, const auto& y) { return std::pair(x.a, x.b) < std::pair(y.a, y.b); });
    return g;
}

// G(n, p) with every node kept (isolated nodes allowed).
inline tradenet::TradeGraph random_graph(size_t n, double p, Rng& rng) {
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    for (uint32_t a = 0; a < n; ++a) {
        for (uint32_t b = a + 1; b < n; ++b) {
            if (rng.uniform() < p) edges.emplace_back(a, b);
        }
    }
    return make_graph(n, std::move(edges));
}

inline tradenet::TradeRecord rec(int year, std::string reporter, std::string partner,
                                 std::string product, double exports, double imports) {
    return tradenet::TradeRecord{year, std::move(reporter), std::move(partner),
                                 std::move(product), exports, imports};
}

inline void write_text(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::string s;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        s.append(buf, static_cast<size_t>(in.gcount()));
    }
    return s;
}

} // namespace testutil

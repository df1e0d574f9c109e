#pragma once

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fraccrit/coloring.hpp"
#include "fraccrit/egraph.hpp"

namespace testing {

inline std::string data_path(const std::string& rel) { return std::string(FRACCRIT_DATA_DIR) + "/" + rel; }

inline std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline fraccrit::EGraph load_graph(const std::string& rel) { return fraccrit::parse_egraph(slurp(data_path(rel))); }

inline fraccrit::EGraph g(const char* text) { return fraccrit::parse_egraph(text); }

// Vertices named by decimal index, edges given explicitly, every ext equal to `ext` (0 = degree).
inline fraccrit::EGraph from_edges(int n, const std::vector<std::pair<int, int>>& edges, int ext = 0) {
    fraccrit::EGraph h;
    for (int i = 0; i < n; ++i) h.add_vertex("v" + std::to_string(i));
    for (auto [a, b] : edges) h.add_edge(a, b);
    for (int i = 0; i < n; ++i) h.set_ext(i, ext ? std::max(ext, h.degree(i)) : h.degree(i));
    return h;
}

// Connected subcubic triangle-free graph grown by random edge insertion (fixed seed per caller).
inline fraccrit::EGraph random_subcubic(std::mt19937& rng, int n, int extra_edges) {
    std::vector<std::pair<int, int>> edges;
    std::vector<int> deg(n, 0);
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    auto can_add = [&](int a, int b) {
        if (a == b || adj[a][b] || deg[a] >= 3 || deg[b] >= 3) return false;
        for (int c = 0; c < n; ++c)
            if (adj[a][c] && adj[b][c]) return false;
        return true;
    };
    auto add = [&](int a, int b) {
        adj[a][b] = adj[b][a] = true;
        ++deg[a];
        ++deg[b];
        edges.emplace_back(a, b);
    };
    for (int v = 1; v < n; ++v) {
        std::vector<int> cand;
        for (int u = 0; u < v; ++u)
            if (can_add(u, v)) cand.push_back(u);
        if (cand.empty()) throw std::logic_error("random_subcubic: stuck");
        add(cand[std::uniform_int_distribution<size_t>(0, cand.size() - 1)(rng)], v);
    }
    for (int tries = 0, added = 0; added < extra_edges && tries < 2000; ++tries) {
        int a = std::uniform_int_distribution<int>(0, n - 1)(rng);
        int b = std::uniform_int_distribution<int>(0, n - 1)(rng);
        if (can_add(a, b)) {
            add(a, b);
            ++added;
        }
    }
    return from_edges(n, edges);
}

// Every vertex raised to ext 3, the cubic e-graph over the underlying graph.
inline fraccrit::EGraph cubic_over(const fraccrit::EGraph& h) {
    fraccrit::EGraph c = h;
    for (int v = 0; v < c.size(); ++v) c.set_ext(v, 3);
    return c;
}

// Brute-force maximum independent weight, scanning all 2^n subsets.
inline fraccrit::Rational brute_max_independent_weight(const fraccrit::EGraph& h,
                                                       const std::vector<fraccrit::Rational>& w) {
    fraccrit::Rational best = 0;
    const int n = h.size();
    for (fraccrit::Mask s = 0; s < (fraccrit::Mask(1) << n); ++s) {
        bool ok = true;
        fraccrit::Rational sum = 0;
        for (int v = 0; v < n && ok; ++v) {
            if (!((s >> v) & 1)) continue;
            if (h.neighbor_mask(v) & s) ok = false;
            sum += w[v];
        }
        if (ok && sum > best) best = sum;
    }
    return best;
}

}  // namespace testing

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <string>
#include <vector>

#include "wta/graph.hpp"
#include "wta/rng.hpp"
#include "wta/spanning_tree.hpp"

namespace wta {

enum class TreeKind { RST, NWRST, DFST, MST, SPST };

inline const char* tree_kind_name(TreeKind k) {
    switch (k) {
        case TreeKind::RST: return "rst";
        case TreeKind::NWRST: return "nwrst";
        case TreeKind::DFST: return "dfst";
        case TreeKind::MST: return "mst";
        case TreeKind::SPST: return "spst";
    }
    return "?";
}

inline TreeKind parse_tree_kind(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), ::tolower);
    if (s == "rst") return TreeKind::RST;
    if (s == "nwrst") return TreeKind::NWRST;
    if (s == "dfst") return TreeKind::DFST;
    if (s == "mst") return TreeKind::MST;
    if (s == "spst") return TreeKind::SPST;
    throw LoadError("unknown tree kind: " + s);
}

namespace detail {

// Wilson's loop-erased random walk sampler. When weighted, the walk steps to
// a neighbor with probability proportional to the edge weight; otherwise
// uniformly. parent_weight always carries the original graph weight.
inline SpanningTree wilson(const Graph& g, RngStream& rng, bool weighted) {
    g.require_connected("sample_rst");
    const int n = g.node_count();
    SpanningTree t;
    t.root = (n > 0) ? static_cast<int>(rng.uniform_index(n)) : 0;
    t.parent.assign(n, -1);
    t.parent_weight.assign(n, 0.0);
    if (n == 0) return t;
    t.parent[t.root] = t.root;

    // per-node cumulative weights for weighted transition sampling
    std::vector<std::vector<double>> cumw;
    if (weighted) {
        cumw.resize(n);
        for (int u = 0; u < n; ++u) {
            double acc = 0.0;
            cumw[u].reserve(g.neighbors(u).size());
            for (const Neighbor& nb : g.neighbors(u)) {
                acc += nb.weight;
                cumw[u].push_back(acc);
            }
        }
    }
    auto step = [&](int u) -> int {
        const auto& nbs = g.neighbors(u);
        if (!weighted) return static_cast<int>(rng.uniform_index(nbs.size()));
        double x = rng.uniform01() * cumw[u].back();
        auto it = std::lower_bound(cumw[u].begin(), cumw[u].end(), x);
        return static_cast<int>(std::min<std::ptrdiff_t>(it - cumw[u].begin(),
                                                         nbs.size() - 1));
    };

    std::vector<char> in_tree(n, 0);
    in_tree[t.root] = 1;
    std::vector<int> next_choice(n, -1);  // chosen neighbor index, loop-erased implicitly
    for (int start = 0; start < n; ++start) {
        int u = start;
        while (!in_tree[u]) {
            next_choice[u] = step(u);
            u = g.neighbors(u)[next_choice[u]].node;
        }
        u = start;
        while (!in_tree[u]) {
            in_tree[u] = 1;
            const Neighbor& nb = g.neighbors(u)[next_choice[u]];
            t.parent[u] = nb.node;
            t.parent_weight[u] = nb.weight;
            u = nb.node;
        }
    }
    return t;
}

}  // namespace detail

// Random spanning tree, probability proportional to the product of edge weights.
inline SpanningTree sample_rst(const Graph& g, RngStream& rng) {
    return detail::wilson(g, rng, true);
}

// Uniform random spanning tree (weights ignored for sampling, restored on the tree).
inline SpanningTree sample_nwrst(const Graph& g, RngStream& rng) {
    return detail::wilson(g, rng, false);
}

// Randomized depth-first spanning tree: random root, each descent picks an
// unvisited neighbor with probability proportional to edge weight.
inline SpanningTree sample_dfst(const Graph& g, RngStream& rng) {
    g.require_connected("sample_dfst");
    const int n = g.node_count();
    SpanningTree t;
    t.root = (n > 0) ? static_cast<int>(rng.uniform_index(n)) : 0;
    t.parent.assign(n, -1);
    t.parent_weight.assign(n, 0.0);
    if (n == 0) return t;
    t.parent[t.root] = t.root;

    std::vector<char> visited(n, 0);
    std::vector<int> stack{t.root};
    visited[t.root] = 1;
    while (!stack.empty()) {
        int u = stack.back();
        double total = 0.0;
        for (const Neighbor& nb : g.neighbors(u))
            if (!visited[nb.node]) total += nb.weight;
        if (total == 0.0) {
            stack.pop_back();
            continue;
        }
        double x = rng.uniform01() * total;
        const Neighbor* chosen = nullptr;
        double acc = 0.0;
        for (const Neighbor& nb : g.neighbors(u)) {
            if (visited[nb.node]) continue;
            acc += nb.weight;
            chosen = &nb;
            if (x < acc) break;
        }
        visited[chosen->node] = 1;
        t.parent[chosen->node] = u;
        t.parent_weight[chosen->node] = chosen->weight;
        stack.push_back(chosen->node);
    }
    return t;
}

// Spanning tree minimizing the sum of resistors (Kruskal on cost 1/w,
// ties broken by smallest edge id). Deterministic.
inline SpanningTree minimum_spanning_tree(const Graph& g) {
    g.require_connected("minimum_spanning_tree");
    const int n = g.node_count();
    std::vector<int> order(g.edge_count());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return 1.0 / g.edge(a).w < 1.0 / g.edge(b).w;
    });

    std::vector<int> uf(n);
    std::iota(uf.begin(), uf.end(), 0);
    auto find = [&](int x) {
        while (uf[x] != x) {
            uf[x] = uf[uf[x]];
            x = uf[x];
        }
        return x;
    };

    std::vector<std::vector<Neighbor>> adj(n);
    for (int id : order) {
        const Edge& e = g.edge(id);
        int ru = find(e.u), rv = find(e.v);
        if (ru == rv) continue;
        uf[ru] = rv;
        adj[e.u].push_back({e.v, e.w, id});
        adj[e.v].push_back({e.u, e.w, id});
    }

    SpanningTree t;
    t.root = 0;
    t.parent.assign(n, -1);
    t.parent_weight.assign(n, 0.0);
    if (n == 0) return t;
    t.parent[0] = 0;
    std::vector<int> stack{0};
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (const Neighbor& nb : adj[u]) {
            if (t.parent[nb.node] == -1) {
                t.parent[nb.node] = u;
                t.parent_weight[nb.node] = nb.weight;
                stack.push_back(nb.node);
            }
        }
    }
    return t;
}

namespace detail {

// Dijkstra shortest-path tree under edge length 1/w, rooted at src.
// Distance ties prefer the smaller parent node id.
inline SpanningTree dijkstra_tree(const Graph& g, int src) {
    const int n = g.node_count();
    SpanningTree t;
    t.root = src;
    t.parent.assign(n, -1);
    t.parent_weight.assign(n, 0.0);
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    dist[src] = 0.0;
    t.parent[src] = src;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    pq.push({0.0, src});
    std::vector<char> done(n, 0);
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (done[u]) continue;
        done[u] = 1;
        for (const Neighbor& nb : g.neighbors(u)) {
            double nd = d + 1.0 / nb.weight;
            if (nd < dist[nb.node] ||
                (nd == dist[nb.node] && !done[nb.node] && u < t.parent[nb.node])) {
                dist[nb.node] = nd;
                t.parent[nb.node] = u;
                t.parent_weight[nb.node] = nb.weight;
                pq.push({nd, nb.node});
            }
        }
    }
    return t;
}

}  // namespace detail

// Shortest-path spanning tree: num_roots random roots, keep the candidate
// with the smallest resistance diameter.
inline SpanningTree shortest_path_tree(const Graph& g, RngStream& rng, int num_roots = 10) {
    g.require_connected("shortest_path_tree");
    if (num_roots < 1) throw ContractError("shortest_path_tree: num_roots must be >= 1");
    const int n = g.node_count();
    SpanningTree best;
    double best_diam = std::numeric_limits<double>::infinity();
    for (int k = 0; k < num_roots; ++k) {
        int root = (n > 0) ? static_cast<int>(rng.uniform_index(n)) : 0;
        SpanningTree cand = detail::dijkstra_tree(g, root);
        double diam = tree_diameter(cand);
        if (diam < best_diam) {
            best_diam = diam;
            best = std::move(cand);
        }
    }
    return best;
}

inline SpanningTree sample_tree(const Graph& g, TreeKind kind, RngStream& rng,
                                int spst_roots = 10) {
    switch (kind) {
        case TreeKind::RST: return sample_rst(g, rng);
        case TreeKind::NWRST: return sample_nwrst(g, rng);
        case TreeKind::DFST: return sample_dfst(g, rng);
        case TreeKind::MST: return minimum_spanning_tree(g);
        case TreeKind::SPST: return shortest_path_tree(g, rng, spst_roots);
    }
    throw ContractError("unknown tree kind");
}

struct InclusionEstimate {
    std::vector<double> frequency;       // by edge id
    std::vector<double> standard_error;  // by edge id
    int samples = 0;
};

// Empirical RST edge inclusion frequencies over repeated Wilson draws.
inline InclusionEstimate estimate_inclusion_probabilities(const Graph& g, RngStream& rng,
                                                          int samples) {
    g.require_connected("estimate_inclusion_probabilities");
    if (samples <= 0) throw ContractError("estimate_inclusion_probabilities: samples must be > 0");
    std::vector<long long> hits(g.edge_count(), 0);
    // edge id lookup: parent edges carry (node, weight); match by endpoints
    std::vector<std::vector<std::pair<int, int>>> edge_id(g.node_count());
    for (int id = 0; id < g.edge_count(); ++id) {
        const Edge& e = g.edge(id);
        edge_id[e.u].push_back({e.v, id});
        edge_id[e.v].push_back({e.u, id});
    }
    auto lookup = [&](int u, int v) {
        for (auto [other, id] : edge_id[u])
            if (other == v) return id;
        throw ContractError("tree edge not found in graph");
    };
    for (int s = 0; s < samples; ++s) {
        SpanningTree t = sample_rst(g, rng);
        for (int v = 0; v < t.node_count(); ++v)
            if (v != t.root) ++hits[lookup(v, t.parent[v])];
    }
    InclusionEstimate est;
    est.samples = samples;
    est.frequency.resize(g.edge_count());
    est.standard_error.resize(g.edge_count());
    for (int id = 0; id < g.edge_count(); ++id) {
        double f = static_cast<double>(hits[id]) / samples;
        est.frequency[id] = f;
        est.standard_error[id] = std::sqrt(f * (1.0 - f) / samples);
    }
    return est;
}

}  // namespace wta

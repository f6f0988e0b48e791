#pragma once

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "wta/errors.hpp"
#include "wta/graph.hpp"

namespace wta {

// Parent-indexed spanning tree. The root is its own parent; parent_weight
// carries the source-graph weight of the edge to the parent.
struct SpanningTree {
    int root = 0;
    std::vector<int> parent;
    std::vector<double> parent_weight;  // unused at the root

    int node_count() const { return static_cast<int>(parent.size()); }

    std::vector<std::vector<Neighbor>> adjacency() const {
        std::vector<std::vector<Neighbor>> adj(parent.size());
        for (int v = 0; v < node_count(); ++v) {
            if (v == root) continue;
            adj[v].push_back({parent[v], parent_weight[v], v});
            adj[parent[v]].push_back({v, parent_weight[v], v});
        }
        return adj;
    }

    // As a Graph (edge id = child node id order).
    Graph as_graph() const {
        std::vector<Edge> edges;
        for (int v = 0; v < node_count(); ++v)
            if (v != root) edges.push_back({parent[v], v, parent_weight[v]});
        return Graph(node_count(), std::move(edges));
    }
};

// Checks the tree shape and that every edge exists in g with the same weight.
inline void validate_tree(const SpanningTree& t, const Graph& g) {
    if (t.node_count() != g.node_count()) throw ContractError("tree/graph node count mismatch");
    const int n = t.node_count();
    if (n == 0) return;
    if (t.root < 0 || t.root >= n || t.parent[t.root] != t.root)
        throw ContractError("invalid tree root");
    // parent pointers must reach the root from every node (acyclic + connected)
    for (int v = 0; v < n; ++v) {
        int u = v, hops = 0;
        while (u != t.root) {
            u = t.parent[u];
            if (++hops > n) throw ContractError("tree has a cycle");
        }
    }
    for (int v = 0; v < n; ++v) {
        if (v == t.root) continue;
        bool found = false;
        for (const Neighbor& nb : g.neighbors(v)) {
            if (nb.node == t.parent[v] && nb.weight == t.parent_weight[v]) {
                found = true;
                break;
            }
        }
        if (!found) throw ContractError("tree edge missing from source graph");
    }
}

// Resistance distance on a tree: sum of 1/w along the unique path.
inline double tree_resistance_distance(const SpanningTree& t, int i, int j) {
    const int n = t.node_count();
    if (i < 0 || i >= n || j < 0 || j >= n)
        throw ContractError("tree_resistance_distance: node out of range");
    if (i == j) return 0.0;
    auto node_depth = [&](int v) {
        int d = 0;
        while (v != t.root) {
            v = t.parent[v];
            ++d;
        }
        return d;
    };
    int di = node_depth(i), dj = node_depth(j);
    double dist = 0.0;
    while (di > dj) {
        dist += 1.0 / t.parent_weight[i];
        i = t.parent[i];
        --di;
    }
    while (dj > di) {
        dist += 1.0 / t.parent_weight[j];
        j = t.parent[j];
        --dj;
    }
    while (i != j) {
        dist += 1.0 / t.parent_weight[i] + 1.0 / t.parent_weight[j];
        i = t.parent[i];
        j = t.parent[j];
    }
    return dist;
}

namespace detail {

// Farthest node from src under resistance length, by DFS over the tree.
inline std::pair<int, double> tree_farthest(const std::vector<std::vector<Neighbor>>& adj,
                                            int src) {
    std::vector<std::pair<int, double>> stack{{src, 0.0}};
    std::vector<char> seen(adj.size(), 0);
    seen[src] = 1;
    int best = src;
    double best_d = 0.0;
    while (!stack.empty()) {
        auto [u, d] = stack.back();
        stack.pop_back();
        if (d > best_d) {
            best_d = d;
            best = u;
        }
        for (const Neighbor& nb : adj[u]) {
            if (!seen[nb.node]) {
                seen[nb.node] = 1;
                stack.push_back({nb.node, d + 1.0 / nb.weight});
            }
        }
    }
    return {best, best_d};
}

}  // namespace detail

// Max pairwise resistance distance, via double sweep.
inline double tree_diameter(const SpanningTree& t) {
    if (t.node_count() <= 1) return 0.0;
    auto adj = t.adjacency();
    auto [far1, d1] = detail::tree_farthest(adj, t.root);
    auto [far2, d2] = detail::tree_farthest(adj, far1);
    (void)far2;
    (void)d1;
    return d2;
}

// Serialization: "root r" line then "child parent weight" lines.
inline void save_tree(const SpanningTree& t, std::ostream& out) {
    out << "root " << t.root << '\n';
    for (int v = 0; v < t.node_count(); ++v)
        if (v != t.root)
            out << v << ' ' << t.parent[v] << ' ' << format_weight(t.parent_weight[v]) << '\n';
}

inline SpanningTree load_tree(std::istream& in) {
    std::string word;
    SpanningTree t;
    if (!(in >> word) || word != "root" || !(in >> t.root))
        throw LoadError("tree file must start with a root line");
    std::vector<std::tuple<int, int, double>> rows;
    int child, parent;
    double w;
    int max_id = t.root;
    while (in >> child >> parent >> w) {
        rows.emplace_back(child, parent, w);
        max_id = std::max({max_id, child, parent});
    }
    t.parent.assign(max_id + 1, -1);
    t.parent_weight.assign(max_id + 1, 0.0);
    t.parent[t.root] = t.root;
    for (auto [c, p, pw] : rows) {
        if (t.parent[c] != -1) throw LoadError("duplicate child in tree file");
        t.parent[c] = p;
        t.parent_weight[c] = pw;
    }
    for (int v = 0; v <= max_id; ++v)
        if (t.parent[v] == -1) throw LoadError("node " + std::to_string(v) + " missing from tree file");
    return t;
}

}  // namespace wta

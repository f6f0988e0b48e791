#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include "wta/graph.hpp"
#include "wta/rng.hpp"
#include "wta/spanning_tree.hpp"

namespace wta {

// Weighted line graph obtained by linearizing a spanning tree: every tree
// node appears exactly once, consecutive nodes are joined by positive
// weights, and prefix_resistance[i] accumulates sum of 1/w from position 0.
struct LineGraph {
    std::vector<int> order;                      // permutation of tree nodes
    std::vector<double> edge_weights;            // size n-1
    std::vector<long double> prefix_resistance;  // size n, strictly increasing

    int size() const { return static_cast<int>(order.size()); }

    long double distance(int pos_a, int pos_b) const {
        return pos_a < pos_b ? prefix_resistance[pos_b] - prefix_resistance[pos_a]
                             : prefix_resistance[pos_a] - prefix_resistance[pos_b];
    }

    // position of each tree node on the line
    std::vector<int> positions() const {
        std::vector<int> pos(order.size());
        for (int i = 0; i < size(); ++i) pos[order[i]] = i;
        return pos;
    }
};

// Depth-first linearization: traverse the tree from `start`, appending every
// traversed edge (forward and backtracking) to a list with duplicates, then
// eliminate duplicate nodes. A run of eliminated duplicates between two
// surviving nodes is replaced by a single edge carrying the minimum weight
// seen along the run, which makes the result independent of elimination order.
inline LineGraph linearize(const SpanningTree& t, std::optional<int> start = std::nullopt,
                           RngStream* child_shuffle = nullptr) {
    const int n = t.node_count();
    LineGraph line;
    if (n == 0) return line;
    int r = start.value_or(t.root);
    if (r < 0 || r >= n) throw ContractError("linearize: start node out of range");

    auto adj = t.adjacency();
    if (child_shuffle != nullptr)
        for (auto& nbs : adj) std::shuffle(nbs.begin(), nbs.end(), child_shuffle->engine());

    // iterative depth-first traversal emitting (weight, node) steps,
    // including backtracking steps
    std::vector<std::pair<double, int>> walk;  // edge weight, arrival node
    walk.reserve(2 * n);
    std::vector<char> visited(n, 0);
    struct Frame {
        int node;
        double up_weight;  // weight back to the parent frame
        size_t next;
    };
    std::vector<Frame> stack;
    stack.push_back({r, 0.0, 0});
    visited[r] = 1;
    while (!stack.empty()) {
        Frame& f = stack.back();
        bool descended = false;
        while (f.next < adj[f.node].size()) {
            const Neighbor& nb = adj[f.node][f.next++];
            if (visited[nb.node]) continue;
            visited[nb.node] = 1;
            walk.push_back({nb.weight, nb.node});
            stack.push_back({nb.node, nb.weight, 0});
            descended = true;
            break;
        }
        if (descended) continue;
        double up = f.up_weight;
        int parent_depth = static_cast<int>(stack.size()) - 2;
        stack.pop_back();
        if (parent_depth >= 0) walk.push_back({up, stack.back().node});
    }

    // duplicate elimination: keep the first occurrence of each node, joining
    // consecutive survivors by the lightest edge among the eliminated run
    std::vector<char> kept(n, 0);
    line.order.push_back(r);
    kept[r] = 1;
    double pending = std::numeric_limits<double>::infinity();
    for (auto [w, node] : walk) {
        pending = std::min(pending, w);
        if (!kept[node]) {
            kept[node] = 1;
            line.order.push_back(node);
            line.edge_weights.push_back(pending);
            pending = std::numeric_limits<double>::infinity();
        }
    }

    line.prefix_resistance.resize(line.order.size());
    long double acc = 0.0L;
    line.prefix_resistance[0] = 0.0L;
    for (size_t i = 0; i < line.edge_weights.size(); ++i) {
        acc += 1.0L / static_cast<long double>(line.edge_weights[i]);
        line.prefix_resistance[i + 1] = acc;
    }
    return line;
}

// (count, weight) cutsizes over consecutive line pairs.
inline std::pair<int, double> line_cutsizes(const LineGraph& l, const Labeling& y) {
    y.require_known("line_cutsizes");
    int count = 0;
    double weight = 0.0;
    for (size_t i = 0; i + 1 < l.order.size(); ++i) {
        if (y.values[l.order[i]] != y.values[l.order[i + 1]]) {
            ++count;
            weight += l.edge_weights[i];
        }
    }
    return {count, weight};
}

// Debug/fixture serialization: "node w node w node ..." on one line.
inline void save_line(const LineGraph& l, std::ostream& out) {
    for (int i = 0; i < l.size(); ++i) {
        if (i > 0) out << ' ' << l.edge_weights[i - 1] << ' ';
        out << l.order[i];
    }
    out << '\n';
}

// All-ones weight copy: the non-weighted predictor variant runs on this.
inline LineGraph with_unit_weights(const LineGraph& l) {
    LineGraph u;
    u.order = l.order;
    u.edge_weights.assign(l.edge_weights.size(), 1.0);
    u.prefix_resistance.resize(l.order.size());
    for (size_t i = 0; i < u.prefix_resistance.size(); ++i)
        u.prefix_resistance[i] = static_cast<long double>(i);
    return u;
}

}  // namespace wta

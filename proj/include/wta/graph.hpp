#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "wta/errors.hpp"

namespace wta {

struct Edge {
    int u;
    int v;
    double w;
};

struct Neighbor {
    int node;
    double weight;
    int edge_id;
};

// Undirected weighted simple graph, immutable after construction.
// Edge ids follow insertion (file) order; all per-edge tables index by them.
class Graph {
  public:
    Graph() = default;

    Graph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
        adjacency_.resize(n_);
        for (int id = 0; id < static_cast<int>(edges_.size()); ++id) {
            const Edge& e = edges_[id];
            if (e.u < 0 || e.u >= n_ || e.v < 0 || e.v >= n_)
                throw ContractError("edge endpoint out of range");
            if (e.u == e.v) throw ContractError("self-loop");
            if (e.w <= 0.0) throw ContractError("non-positive weight");
            adjacency_[e.u].push_back({e.v, e.w, id});
            adjacency_[e.v].push_back({e.u, e.w, id});
        }
        connected_ = compute_connected();
    }

    int node_count() const { return n_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(int id) const { return edges_[id]; }
    const std::vector<Neighbor>& neighbors(int u) const { return adjacency_[u]; }
    bool connected() const { return connected_; }

    void require_connected(const char* op) const {
        if (!connected_) throw ContractError(std::string(op) + " requires a connected graph");
    }

    // Uniformly rescaled copy (every weight multiplied by alpha).
    Graph rescaled(double alpha) const {
        std::vector<Edge> es = edges_;
        for (Edge& e : es) e.w *= alpha;
        return Graph(n_, std::move(es));
    }

  private:
    bool compute_connected() const {
        if (n_ == 0) return true;
        std::vector<char> seen(n_, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int count = 1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (const Neighbor& nb : adjacency_[u]) {
                if (!seen[nb.node]) {
                    seen[nb.node] = 1;
                    ++count;
                    stack.push_back(nb.node);
                }
            }
        }
        return count == n_;
    }

    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<Neighbor>> adjacency_;
    bool connected_ = true;
};

// Per-node label: -1, +1, or 0 for unknown.
struct Labeling {
    std::vector<std::int8_t> values;

    explicit Labeling(int n = 0) : values(n, 0) {}

    int size() const { return static_cast<int>(values.size()); }
    bool fully_known() const {
        return std::all_of(values.begin(), values.end(), [](std::int8_t v) { return v != 0; });
    }
    void require_known(const char* op) const {
        if (!fully_known()) throw ContractError(std::string(op) + ": unknown label present");
    }
    Labeling flipped() const {
        Labeling f(*this);
        for (auto& v : f.values) v = static_cast<std::int8_t>(-v);
        return f;
    }
};

// Edge-list format: one "u v w" per line, '#' comments, 0-based ids.
inline Graph load_graph(std::istream& in) {
    std::vector<Edge> edges;
    std::map<std::pair<int, int>, int> seen;
    int max_id = -1;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        int u, v;
        double w;
        if (!(ls >> u)) continue;  // blank or comment-only line
        if (!(ls >> v >> w)) throw LoadError("malformed line " + std::to_string(lineno));
        std::string trailing;
        if (ls >> trailing) throw LoadError("malformed line " + std::to_string(lineno));
        if (u < 0 || v < 0) throw LoadError("negative node id at line " + std::to_string(lineno));
        if (u == v) throw LoadError("self-loop at line " + std::to_string(lineno));
        if (w <= 0.0) throw LoadError("non-positive weight at line " + std::to_string(lineno));
        auto key = std::minmax(u, v);
        if (!seen.emplace(key, lineno).second)
            throw LoadError("duplicate edge at line " + std::to_string(lineno));
        edges.push_back({u, v, w});
        max_id = std::max({max_id, u, v});
    }
    return Graph(max_id + 1, std::move(edges));
}

// Full round-trip precision for a double in text form.
inline std::string format_weight(double w) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", w);
    return buf;
}

inline void save_graph(const Graph& g, std::ostream& out) {
    for (const Edge& e : g.edges())
        out << e.u << ' ' << e.v << ' ' << format_weight(e.w) << '\n';
}

// Label file: one "u label" per line; nodes not listed stay unknown.
// Labels are arbitrary integers (multiclass); +/-1 is the binary case.
inline std::vector<std::pair<int, int>> load_label_file(std::istream& in) {
    std::vector<std::pair<int, int>> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        int u, c;
        if (!(ls >> u)) continue;
        if (!(ls >> c)) throw LoadError("malformed label line " + std::to_string(lineno));
        if (u < 0) throw LoadError("negative node id at line " + std::to_string(lineno));
        out.emplace_back(u, c);
    }
    return out;
}

inline Labeling binary_labeling(const std::vector<std::pair<int, int>>& labels, int n) {
    Labeling y(n);
    for (auto [u, c] : labels) {
        if (u >= n) throw LoadError("label for unknown node " + std::to_string(u));
        if (c != -1 && c != 1) throw LoadError("binary label must be +1 or -1");
        y.values[u] = static_cast<std::int8_t>(c);
    }
    return y;
}

// Number of edges whose endpoints disagree (weight-independent).
inline int cutsize(const Graph& g, const Labeling& y) {
    y.require_known("cutsize");
    if (y.size() != g.node_count()) throw ContractError("cutsize: labeling size mismatch");
    int phi = 0;
    for (const Edge& e : g.edges())
        if (y.values[e.u] != y.values[e.v]) ++phi;
    return phi;
}

// Total weight of disagreeing edges.
inline double weighted_cutsize(const Graph& g, const Labeling& y) {
    y.require_known("weighted_cutsize");
    if (y.size() != g.node_count()) throw ContractError("weighted_cutsize: labeling size mismatch");
    double phi = 0.0;
    for (const Edge& e : g.edges())
        if (y.values[e.u] != y.values[e.v]) phi += e.w;
    return phi;
}

}  // namespace wta

#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "wta/graph.hpp"

namespace wta {

// Row-major feature table with an optional per-row class id (last CSV column
// when `has_class` is set at load time).
struct FeatureMatrix {
    std::vector<std::vector<double>> rows;
    std::vector<int> classes;  // empty when no class column

    int row_count() const { return static_cast<int>(rows.size()); }
    int column_count() const { return rows.empty() ? 0 : static_cast<int>(rows[0].size()); }
};

// CSV loader: comma- or whitespace-separated numeric columns, '#' comments.
// When has_class is true the last column is an integer class id.
inline FeatureMatrix load_features(std::istream& in, bool has_class) {
    FeatureMatrix fm;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw.substr(0, raw.find('#'));
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        std::vector<double> vals;
        double v;
        while (ss >> v) vals.push_back(v);
        if (vals.empty()) continue;
        if (has_class) {
            double cls = vals.back();
            vals.pop_back();
            if (cls != std::floor(cls))
                throw LoadError("non-integer class at line " + std::to_string(line_no));
            fm.classes.push_back(static_cast<int>(cls));
        }
        if (!std::all_of(vals.begin(), vals.end(), [](double x) { return std::isfinite(x); }))
            throw LoadError("non-finite feature at line " + std::to_string(line_no));
        if (!fm.rows.empty() && vals.size() != fm.rows[0].size())
            throw LoadError("ragged row at line " + std::to_string(line_no));
        if (vals.empty()) throw LoadError("empty feature row at line " + std::to_string(line_no));
        fm.rows.push_back(std::move(vals));
    }
    return fm;
}

// Gaussian-weighted k-nearest-neighbor graph:
// w_ij = exp(-|xi - xj|^2 / sigma2_ij), sigma2_i = mean squared distance
// from i to its k nearest rows, sigma2_ij = (sigma2_i + sigma2_j) / 2.
// Edges are the union over directions, so the graph is undirected.
inline Graph build_knn_graph(const FeatureMatrix& x, int k) {
    const int n = x.row_count();
    if (n < 2) throw ContractError("build_knn_graph: need at least two rows");
    if (k < 1 || k >= n) throw ContractError("build_knn_graph: k must satisfy 1 <= k < rows");

    auto sqdist = [&](int i, int j) {
        double s = 0.0;
        for (size_t c = 0; c < x.rows[i].size(); ++c) {
            double d = x.rows[i][c] - x.rows[j][c];
            s += d * d;
        }
        return s;
    };

    std::vector<std::vector<int>> nearest(n);
    std::vector<double> sigma2(n, 0.0);
    std::vector<std::pair<double, int>> cand;
    for (int i = 0; i < n; ++i) {
        cand.clear();
        for (int j = 0; j < n; ++j)
            if (j != i) cand.push_back({sqdist(i, j), j});
        std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
        double acc = 0.0;
        for (int t = 0; t < k; ++t) {
            nearest[i].push_back(cand[t].second);
            acc += cand[t].first;
        }
        sigma2[i] = acc / k;
    }

    std::set<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i)
        for (int j : nearest[i]) pairs.insert({std::min(i, j), std::max(i, j)});

    std::vector<Edge> edges;
    edges.reserve(pairs.size());
    for (auto [u, v] : pairs) {
        double s2 = 0.5 * (sigma2[u] + sigma2[v]);
        // identical rows everywhere would give s2 = 0; the 0/0 exponent is
        // taken as 0 so coincident points get weight 1
        double w = s2 > 0.0 ? std::exp(-sqdist(u, v) / s2) : 1.0;
        edges.push_back({u, v, w});
    }
    return Graph(n, edges);
}

}  // namespace wta

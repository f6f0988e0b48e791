#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "wta/graph.hpp"

namespace wta {

// Per-edge effective resistance r and spanning-tree inclusion probability
// p = w * r. Bridges have p = 1; sum of p over all edges is n - 1.
struct ResistanceTable {
    std::vector<double> resistance;   // by edge id
    std::vector<double> inclusion_p;  // by edge id
    int node_count = 0;

    double sum_inclusion() const {
        double s = 0.0;
        for (double p : inclusion_p) s += p;
        return s;
    }
};

inline constexpr int kDefaultDenseSolveCap = 2000;

// Exact effective resistances via a grounded-Laplacian dense factorization
// (node 0 grounded). r_ij = M_ii + M_jj - 2 M_ij with M the grounded inverse
// extended by a zero row/column at the ground node.
inline ResistanceTable effective_resistances(const Graph& g,
                                             int dense_cap = kDefaultDenseSolveCap) {
    g.require_connected("effective_resistances");
    const int n = g.node_count();
    if (n > dense_cap)
        throw ContractError("effective_resistances: graph exceeds dense solve cap (" +
                            std::to_string(dense_cap) + " nodes); use Monte Carlo estimation");
    ResistanceTable rt;
    rt.node_count = n;
    if (n <= 1) return rt;

    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
    for (const Edge& e : g.edges()) {
        lap(e.u, e.u) += e.w;
        lap(e.v, e.v) += e.w;
        lap(e.u, e.v) -= e.w;
        lap(e.v, e.u) -= e.w;
    }
    Eigen::MatrixXd grounded = lap.bottomRightCorner(n - 1, n - 1);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(grounded);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw ContractError("effective_resistances: singular or ill-conditioned grounded Laplacian");
    Eigen::MatrixXd inv = ldlt.solve(Eigen::MatrixXd::Identity(n - 1, n - 1));
    double residual = (grounded * inv - Eigen::MatrixXd::Identity(n - 1, n - 1)).norm();
    if (!std::isfinite(residual) || residual > 1e-6 * n)
        throw ContractError("effective_resistances: ill-conditioned solve, residual " +
                            std::to_string(residual));

    auto entry = [&](int i, int j) -> double {
        if (i == 0 || j == 0) return 0.0;
        return inv(i - 1, j - 1);
    };
    rt.resistance.reserve(g.edge_count());
    rt.inclusion_p.reserve(g.edge_count());
    for (const Edge& e : g.edges()) {
        double r = entry(e.u, e.u) + entry(e.v, e.v) - 2.0 * entry(e.u, e.v);
        rt.resistance.push_back(r);
        rt.inclusion_p.push_back(e.w * r);
    }
    return rt;
}

// Expected cutsize of a random spanning tree: sum of p over phi-edges.
inline double expected_tree_cutsize(const Graph& g, const Labeling& y,
                                    const ResistanceTable& rt) {
    y.require_known("expected_tree_cutsize");
    if (rt.node_count != g.node_count() ||
        static_cast<int>(rt.inclusion_p.size()) != g.edge_count())
        throw ContractError("expected_tree_cutsize: resistance table mismatch");
    double total = 0.0;
    for (int id = 0; id < g.edge_count(); ++id) {
        const Edge& e = g.edge(id);
        if (y.values[e.u] != y.values[e.v]) total += rt.inclusion_p[id];
    }
    return total;
}

}  // namespace wta

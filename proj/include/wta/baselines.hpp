#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "wta/graph.hpp"
#include "wta/predictor.hpp"
#include "wta/spanning_tree.hpp"

namespace wta {

// Sign of the weighted sum of revealed neighbor labels; unrevealed neighbors
// contribute zero and a zero sum defaults to +1 (the shared tie convention).
inline std::int8_t wmv_predict(const Graph& g, const Labeling& revealed, int node) {
    if (node < 0 || node >= g.node_count()) throw ContractError("wmv_predict: node out of range");
    double sum = 0.0;
    for (const Neighbor& nb : g.neighbors(node))
        sum += static_cast<double>(revealed.values[nb.node]) * nb.weight;
    return sum >= 0.0 ? +1 : -1;
}

struct LabPropConfig {
    double tolerance = 1e-6;
    int max_iterations = 10000;
};

struct LabPropResult {
    std::vector<double> scores;        // harmonic solution, clamped on train nodes
    std::vector<std::int8_t> labels;   // sign(score), 0 -> +1
    bool converged = true;
    int iterations = 0;
};

// Harmonic label propagation via Jacobi sweeps: train nodes are clamped,
// every other node's score is the weighted average of its neighbors'.
inline LabPropResult label_propagation(const Graph& g, const Labeling& train,
                                       const LabPropConfig& cfg = {}) {
    g.require_connected("label_propagation");
    if (cfg.tolerance <= 0.0) throw ContractError("label_propagation: tolerance must be > 0");
    const int n = g.node_count();
    bool any_train = false;
    for (int v = 0; v < n; ++v) any_train |= train.values[v] != 0;
    if (!any_train) throw ContractError("label_propagation: no train labels");

    LabPropResult res;
    res.scores.assign(n, 0.0);
    for (int v = 0; v < n; ++v) res.scores[v] = train.values[v];

    std::vector<double> next(n);
    for (res.iterations = 0; res.iterations < cfg.max_iterations; ++res.iterations) {
        double max_change = 0.0;
        for (int v = 0; v < n; ++v) {
            if (train.values[v] != 0) {
                next[v] = train.values[v];
                continue;
            }
            double num = 0.0, den = 0.0;
            for (const Neighbor& nb : g.neighbors(v)) {
                num += nb.weight * res.scores[nb.node];
                den += nb.weight;
            }
            next[v] = den > 0.0 ? num / den : 0.0;
            max_change = std::max(max_change, std::abs(next[v] - res.scores[v]));
        }
        res.scores.swap(next);
        if (max_change < cfg.tolerance) break;
    }
    res.converged = res.iterations < cfg.max_iterations;
    res.labels.resize(n);
    for (int v = 0; v < n; ++v) res.labels[v] = res.scores[v] >= 0.0 ? +1 : -1;
    return res;
}

inline constexpr int kGpaNodeCap = 4000;

// Laplacian kernel of a tree from its pairwise resistances:
// L+ = -1/2 C R C with C the centering projector, plus the all-ones rank-one
// shift. The shift coefficient is 1 + (resistance diameter), i.e. the inverse
// of the bias parameter b = 1/(n^2 (1 + D)) in the L + b 11^T formulation;
// with that choice the constant component of any labeling costs at most one
// mistake, since every off-diagonal resistance term is dominated by the
// shift. Dense, so capped in size.
inline Eigen::MatrixXd gpa_kernel(const SpanningTree& t) {
    const int n = t.node_count();
    if (n > kGpaNodeCap)
        throw ContractError("gpa_kernel: tree exceeds dense kernel cap (" +
                            std::to_string(kGpaNodeCap) + " nodes); use the WTA predictor instead");
    // pairwise resistance matrix by traversal from each node
    auto adj = t.adjacency();
    Eigen::MatrixXd rmat = Eigen::MatrixXd::Zero(n, n);
    std::vector<std::pair<int, double>> stack;
    for (int src = 0; src < n; ++src) {
        std::vector<char> seen(n, 0);
        stack.assign(1, {src, 0.0});
        seen[src] = 1;
        while (!stack.empty()) {
            auto [u, d] = stack.back();
            stack.pop_back();
            rmat(src, u) = d;
            for (const Neighbor& nb : adj[u])
                if (!seen[nb.node]) {
                    seen[nb.node] = 1;
                    stack.push_back({nb.node, d + 1.0 / nb.weight});
                }
        }
    }
    Eigen::MatrixXd center =
        Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
    Eigen::MatrixXd pinv = -0.5 * center * rmat * center;
    double shift = 1.0 + rmat.maxCoeff();
    return pinv + Eigen::MatrixXd::Constant(n, n, shift);
}

// Kernel Perceptron on a spanning tree with the Laplacian-pseudoinverse
// kernel; mistake-driven dual updates, zero score predicts +1.
inline OnlineTrace graph_perceptron_tree(const SpanningTree& t, const std::vector<int>& order,
                                         const Labeling& y) {
    y.require_known("graph_perceptron_tree");
    const int n = t.node_count();
    if (static_cast<int>(order.size()) != n)
        throw ContractError("graph_perceptron_tree: order size mismatch");
    Eigen::MatrixXd kernel = gpa_kernel(t);
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    OnlineTrace trace;
    trace.steps.reserve(n);
    for (int v : order) {
        double score = kernel.row(v).dot(alpha);
        std::int8_t pred = score >= 0.0 ? +1 : -1;
        std::int8_t truth = y.values[v];
        bool mistake = pred != truth;
        trace.steps.push_back({v, pred, truth, mistake});
        if (mistake) {
            ++trace.mistakes;
            alpha(v) += truth;
        }
    }
    return trace;
}

// Batch variant mirroring WTA's train/test protocol: train labels drive
// Perceptron updates (cycled once in the given order), test nodes are then
// scored without feedback.
inline std::vector<std::int8_t> graph_perceptron_batch(
    const SpanningTree& t, const std::vector<std::pair<int, std::int8_t>>& train,
    const std::vector<int>& test) {
    const int n = t.node_count();
    Eigen::MatrixXd kernel = gpa_kernel(t);
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    for (auto [v, label] : train) {
        double score = kernel.row(v).dot(alpha);
        std::int8_t pred = score >= 0.0 ? +1 : -1;
        if (pred != label) alpha(v) += label;
    }
    std::vector<std::int8_t> out;
    out.reserve(test.size());
    for (int v : test) {
        double score = kernel.row(v).dot(alpha);
        out.push_back(score >= 0.0 ? +1 : -1);
    }
    return out;
}

}  // namespace wta

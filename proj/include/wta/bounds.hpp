#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <set>
#include <vector>

#include "wta/graph.hpp"
#include "wta/linearize.hpp"
#include "wta/predictor.hpp"
#include "wta/resistance.hpp"
#include "wta/rng.hpp"
#include "wta/spanning_tree.hpp"

namespace wta {

// Lower-bound adversary instance: random labels on the K lightest nodes
// (by inclusion-probability weight), a single cutsize-minimizing sign
// everywhere else.
struct AdversarialInstance {
    int budget = 0;
    std::vector<int> hard_nodes;       // S, sorted
    Labeling labeling;
    std::vector<double> node_weights;  // P_i = sum of incident p_ij
    double p_cutsize = 0.0;            // Phi^P_G(y), guaranteed < budget
};

inline AdversarialInstance adversarial_labeling(const Graph& g, int budget, RngStream& rng) {
    g.require_connected("adversarial_labeling");
    const int n = g.node_count();
    if (budget < 1 || budget > n) throw ContractError("adversarial_labeling: budget out of range");
    ResistanceTable rt = effective_resistances(g);

    AdversarialInstance inst;
    inst.budget = budget;
    inst.node_weights.assign(n, 0.0);
    for (int id = 0; id < g.edge_count(); ++id) {
        const Edge& e = g.edge(id);
        inst.node_weights[e.u] += rt.inclusion_p[id];
        inst.node_weights[e.v] += rt.inclusion_p[id];
    }
    std::vector<int> by_weight(n);
    std::iota(by_weight.begin(), by_weight.end(), 0);
    std::stable_sort(by_weight.begin(), by_weight.end(), [&](int a, int b) {
        return inst.node_weights[a] < inst.node_weights[b];
    });
    inst.hard_nodes.assign(by_weight.begin(), by_weight.begin() + budget);
    std::sort(inst.hard_nodes.begin(), inst.hard_nodes.end());

    inst.labeling = Labeling(n);
    for (int v : inst.hard_nodes)
        inst.labeling.values[v] = rng.uniform01() < 0.5 ? -1 : +1;

    auto p_cut = [&](std::int8_t outside) {
        std::vector<std::int8_t> y(inst.labeling.values);
        for (int v = 0; v < n; ++v)
            if (y[v] == 0) y[v] = outside;
        double phi = 0.0;
        for (int id = 0; id < g.edge_count(); ++id) {
            const Edge& e = g.edge(id);
            if (y[e.u] != y[e.v]) phi += rt.inclusion_p[id];
        }
        return phi;
    };
    double plus = p_cut(+1), minus = p_cut(-1);
    std::int8_t outside = plus <= minus ? +1 : -1;
    for (int v = 0; v < n; ++v)
        if (inst.labeling.values[v] == 0) inst.labeling.values[v] = outside;
    inst.p_cutsize = std::min(plus, minus);
    return inst;
}

// Online learner interface for duels: predict a label, then observe the truth.
struct OnlineLearner {
    std::function<std::int8_t(int node)> predict;
    std::function<void(int node, std::int8_t truth)> observe;
};

using LearnerFactory = std::function<OnlineLearner(const Graph&, RngStream&)>;

struct DuelStats {
    double mean_mistakes_on_hard = 0.0;
    double stddev = 0.0;
    int trials = 0;
};

// Repeatedly draw adversarial instances and run the learner through the full
// online protocol, counting mistakes on the hard set S.
inline DuelStats duel(const Graph& g, int budget, const LearnerFactory& make_learner, int trials,
                      RngStream& rng, std::optional<std::vector<int>> order = std::nullopt) {
    std::vector<int> present;
    if (order) {
        present = *order;
    } else {
        present.resize(g.node_count());
        std::iota(present.begin(), present.end(), 0);
    }
    double sum = 0.0, sumsq = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        RngStream adv_rng = rng.substream(2 * trial);
        RngStream learner_rng = rng.substream(2 * trial + 1);
        AdversarialInstance inst = adversarial_labeling(g, budget, adv_rng);
        std::vector<char> hard(g.node_count(), 0);
        for (int v : inst.hard_nodes) hard[v] = 1;
        OnlineLearner learner = make_learner(g, learner_rng);
        int mistakes = 0;
        for (int v : present) {
            std::int8_t pred = learner.predict(v);
            std::int8_t truth = inst.labeling.values[v];
            if (pred != truth && hard[v]) ++mistakes;
            learner.observe(v, truth);
        }
        sum += mistakes;
        sumsq += static_cast<double>(mistakes) * mistakes;
    }
    DuelStats stats;
    stats.trials = trials;
    stats.mean_mistakes_on_hard = sum / trials;
    stats.stddev = std::sqrt(std::max(0.0, sumsq / trials - stats.mean_mistakes_on_hard *
                                                                stats.mean_mistakes_on_hard));
    return stats;
}

// Sum of the K heaviest tree edge weights.
inline double zeta(const SpanningTree& t, int k) {
    const int m = t.node_count() - 1;
    if (k < 0 || k > m) throw ContractError("zeta: K out of range");
    std::vector<double> weights;
    weights.reserve(m);
    for (int v = 0; v < t.node_count(); ++v)
        if (v != t.root) weights.push_back(t.parent_weight[v]);
    std::partial_sort(weights.begin(), weights.begin() + k, weights.end(), std::greater<>());
    return std::accumulate(weights.begin(), weights.begin() + k, 0.0);
}

// Hamming distance between labelings.
inline int label_distance(const Labeling& a, const Labeling& b) {
    if (a.size() != b.size()) throw ContractError("label_distance: length mismatch");
    a.require_known("label_distance");
    b.require_known("label_distance");
    int d = 0;
    for (int i = 0; i < a.size(); ++i)
        if (a.values[i] != b.values[i]) ++d;
    return d;
}

// Sum of resistors over phi-free tree edges not in `excluded` (edge keyed by
// its child node id). Houses R^W_T and R^W_T(not E').
inline double residual_resistance(const SpanningTree& t, const Labeling& y,
                                  const std::set<int>& excluded = {}) {
    y.require_known("residual_resistance");
    for (int child : excluded) {
        if (child < 0 || child >= t.node_count() || child == t.root)
            throw ContractError("residual_resistance: invalid excluded edge");
        if (y.values[child] != y.values[t.parent[child]])
            throw ContractError("residual_resistance: excluded edge is a phi-edge");
    }
    double total = 0.0;
    for (int v = 0; v < t.node_count(); ++v) {
        if (v == t.root) continue;
        if (y.values[v] != y.values[t.parent[v]]) continue;
        if (excluded.count(v)) continue;
        total += 1.0 / t.parent_weight[v];
    }
    return total;
}

struct ClusterTerm {
    int first_pos;       // leftmost line position of the cluster
    int last_pos;        // rightmost line position
    int first_queried;   // v0: line position queried first within the cluster
    double left_radius;  // resistance diameter of the left v0-split sub-line
    double left_weight;  // boundary phi-edge weight (0 when the boundary is missing)
    double right_radius;
    double right_weight;
    int bound;           // 1 + ceil terms
};

struct BoundCertificate {
    int observed_mistakes = 0;
    double certified_bound = 0.0;
    std::vector<ClusterTerm> clusters;
    double slack() const { return certified_bound - observed_mistakes; }
};

// Per-cluster dichotomic mistake bound, read off a completed online trace.
// Clusters are maximal phi-free sub-lines; within each, the first queried
// node v0 splits the cluster and each side contributes
// ceil(log2(1 + R * w)) with R its resistance span and w the boundary
// phi-edge weight beyond it.
inline BoundCertificate mistake_certificate(const OnlineTrace& trace, const LineGraph& l,
                                            const Labeling& y) {
    y.require_known("mistake_certificate");
    const int n = l.size();
    if (static_cast<int>(trace.steps.size()) != n)
        throw ContractError("mistake_certificate: trace/line length mismatch");
    auto pos_of = l.positions();
    std::vector<int> query_time(n, -1);
    for (int step = 0; step < n; ++step) {
        int v = trace.steps[step].node;
        if (v < 0 || v >= n || query_time[pos_of[v]] != -1)
            throw ContractError("mistake_certificate: trace does not cover the line");
        query_time[pos_of[v]] = step;
    }

    BoundCertificate cert;
    cert.observed_mistakes = trace.mistakes;
    auto log_term = [](double radius, double weight) {
        return static_cast<int>(std::ceil(std::log2(1.0 + radius * weight)));
    };
    int start = 0;
    while (start < n) {
        int end = start;
        while (end + 1 < n && y.values[l.order[end + 1]] == y.values[l.order[start]]) ++end;
        ClusterTerm term{};
        term.first_pos = start;
        term.last_pos = end;
        term.first_queried = start;
        for (int p = start; p <= end; ++p)
            if (query_time[p] < query_time[term.first_queried]) term.first_queried = p;
        term.left_radius = static_cast<double>(l.distance(start, term.first_queried));
        term.right_radius = static_cast<double>(l.distance(term.first_queried, end));
        term.left_weight = start > 0 ? l.edge_weights[start - 1] : 0.0;
        term.right_weight = end + 1 < n ? l.edge_weights[end] : 0.0;
        term.bound = 1 + log_term(term.left_radius, term.left_weight) +
                     log_term(term.right_radius, term.right_weight);
        cert.certified_bound += term.bound;
        cert.clusters.push_back(term);
        start = end + 1;
    }
    return cert;
}

// Robust cutsize minima over perturbed labelings y'. Exact enumeration for
// n <= 12; otherwise a sampled upper bound on the true minimum.
struct RobustCutsizes {
    double weighted = 0.0;  // min 2(Phi^W_T(y') + zeta_T(delta))
    double count = 0.0;     // min 2(Phi_T(y') + delta)
    bool exact = false;
};

inline RobustCutsizes robust_cutsizes(const SpanningTree& t, const Labeling& y,
                                      RngStream* rng = nullptr, int samples = 200) {
    const int n = t.node_count();
    Graph tg = t.as_graph();
    RobustCutsizes out;
    auto eval = [&](const Labeling& yp) {
        int d = label_distance(y, yp);
        double w = 2.0 * (weighted_cutsize(tg, yp) + zeta(t, std::min(d, n - 1)));
        double c = 2.0 * (cutsize(tg, yp) + d);
        out.weighted = std::min(out.weighted, w);
        out.count = std::min(out.count, c);
    };
    out.weighted = std::numeric_limits<double>::infinity();
    out.count = std::numeric_limits<double>::infinity();
    if (n <= 12) {
        out.exact = true;
        Labeling yp(n);
        for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
            for (int v = 0; v < n; ++v)
                yp.values[v] = (mask >> v) & 1 ? +1 : -1;
            eval(yp);
        }
    } else {
        out.exact = false;
        eval(y);  // y' = y is always a candidate
        if (rng != nullptr) {
            Labeling yp(n);
            for (int s = 0; s < samples; ++s) {
                yp = y;
                int flips = 1 + static_cast<int>(rng->uniform_index(n));
                for (int f = 0; f < flips; ++f) {
                    int v = static_cast<int>(rng->uniform_index(n));
                    yp.values[v] = static_cast<std::int8_t>(-yp.values[v]);
                }
                eval(yp);
            }
        }
    }
    return out;
}

// Diagnostic closed-form bound terms (big-O arguments, no hidden constants).
struct TheoremBoundsReport {
    // tree-side quantities (present when a tree is supplied)
    double tree_cutsize = 0.0;
    double tree_weighted_cutsize = 0.0;
    double residual = 0.0;          // R^W_T(not E')
    double tree_bound_term = 0.0;   // Phi_T (1 + log(1 + R Phi^W/Phi)) + |E'|
    // graph-side quantities (present when resistances are supplied)
    double expected_cutsize = 0.0;      // E[Phi_T]
    double expected_residual = 0.0;     // E[R^W_T]
    double max_phi_weight = 0.0;        // w^phi_max
    double graph_bound_term = 0.0;      // E[Phi_T](1 + log(1 + w^phi_max E[R^W_T]))
    // robust variants
    double robust_count = 0.0;
    double robust_weighted = 0.0;
};

inline TheoremBoundsReport theorem_bounds(const Graph& g, const Labeling& y,
                                          const ResistanceTable& rt,
                                          const SpanningTree* t = nullptr,
                                          const std::set<int>& excluded = {},
                                          RngStream* rng = nullptr) {
    y.require_known("theorem_bounds");
    TheoremBoundsReport rep;
    rep.expected_cutsize = expected_tree_cutsize(g, y, rt);
    for (int id = 0; id < g.edge_count(); ++id) {
        const Edge& e = g.edge(id);
        if (y.values[e.u] != y.values[e.v]) {
            rep.max_phi_weight = std::max(rep.max_phi_weight, e.w);
        } else {
            rep.expected_residual += rt.resistance[id];
        }
    }
    if (rep.expected_cutsize > 0.0)
        rep.graph_bound_term = rep.expected_cutsize *
                               (1.0 + std::log2(1.0 + rep.max_phi_weight * rep.expected_residual));

    if (t != nullptr) {
        Graph tg = t->as_graph();
        rep.tree_cutsize = cutsize(tg, y);
        rep.tree_weighted_cutsize = weighted_cutsize(tg, y);
        rep.residual = residual_resistance(*t, y, excluded);
        if (rep.tree_cutsize > 0)
            rep.tree_bound_term =
                rep.tree_cutsize *
                    (1.0 + std::log2(1.0 + rep.residual * rep.tree_weighted_cutsize /
                                               rep.tree_cutsize)) +
                static_cast<double>(excluded.size());
        else
            rep.tree_bound_term = static_cast<double>(excluded.size());
        RobustCutsizes robust = robust_cutsizes(*t, y, rng);
        rep.robust_count = robust.count;
        rep.robust_weighted = robust.weighted;
    }
    return rep;
}

}  // namespace wta

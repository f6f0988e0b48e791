#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "wta/baselines.hpp"
#include "wta/graph.hpp"
#include "wta/knn.hpp"
#include "wta/linearize.hpp"
#include "wta/predictor.hpp"
#include "wta/rng.hpp"
#include "wta/samplers.hpp"

namespace wta {

struct Split {
    std::vector<int> train;
    std::vector<int> test;
};

// Uniformly random train subset of size round(fraction * n); the complement
// is the test set. Both sides must be non-empty.
inline Split make_split(int n, double fraction, RngStream& rng) {
    if (fraction <= 0.0 || fraction >= 1.0)
        throw ContractError("make_split: fraction must lie in (0,1)");
    int train_size = static_cast<int>(std::lround(fraction * n));
    if (train_size < 1 || train_size >= n)
        throw ContractError("make_split: degenerate split (empty train or test)");
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng.engine());
    Split s;
    s.train.assign(perm.begin(), perm.begin() + train_size);
    s.test.assign(perm.begin() + train_size, perm.end());
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.test.begin(), s.test.end());
    return s;
}

struct Metrics {
    double error = 0.0;
    double f_measure = 0.0;
};

// Error rate and F-measure of binary predictions; positives are label +1.
// F = 2PR/(P+R), defined as 0 when precision + recall is 0.
inline Metrics evaluate(const std::vector<std::int8_t>& pred,
                        const std::vector<std::int8_t>& truth) {
    if (pred.size() != truth.size()) throw ContractError("evaluate: length mismatch");
    if (pred.empty()) throw ContractError("evaluate: empty test set");
    int wrong = 0, tp = 0, fp = 0, fn = 0;
    for (size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] != truth[i]) ++wrong;
        if (pred[i] == +1 && truth[i] == +1) ++tp;
        if (pred[i] == +1 && truth[i] == -1) ++fp;
        if (pred[i] == -1 && truth[i] == +1) ++fn;
    }
    Metrics m;
    m.error = static_cast<double>(wrong) / pred.size();
    double prec = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    double rec = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    m.f_measure = prec + rec > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
    return m;
}

// One predictor configuration: an algorithm name, an optional tree kind, and
// an optional committee size. Text forms: "LABPROP", "WTA+MST", "17*WTA+RST".
struct AlgoSpec {
    std::string algo;  // wta | nwwta | wmv | labprop | gpa
    bool uses_tree = false;
    TreeKind tree = TreeKind::RST;
    int committee = 1;

    std::string name() const {
        std::string s;
        if (committee > 1) s += std::to_string(committee) + "*";
        s += algo;
        if (uses_tree) s += std::string("+") + tree_kind_name(tree);
        return s;
    }
};

inline AlgoSpec parse_algo_spec(const std::string& text) {
    AlgoSpec spec;
    std::string rest = text;
    if (auto star = rest.find('*'); star != std::string::npos) {
        try {
            spec.committee = std::stoi(rest.substr(0, star));
        } catch (const std::exception&) {
            throw LoadError("bad committee size in algorithm spec: " + text);
        }
        if (spec.committee < 1 || spec.committee % 2 == 0)
            throw LoadError("committee size must be odd and positive: " + text);
        rest = rest.substr(star + 1);
    }
    std::string tree_part;
    if (auto plus = rest.find('+'); plus != std::string::npos) {
        tree_part = rest.substr(plus + 1);
        rest = rest.substr(0, plus);
    }
    std::transform(rest.begin(), rest.end(), rest.begin(), ::tolower);
    if (rest != "wta" && rest != "nwwta" && rest != "wmv" && rest != "labprop" && rest != "gpa")
        throw LoadError("unknown algorithm: " + text);
    spec.algo = rest;
    bool needs_tree = rest == "wta" || rest == "nwwta" || rest == "gpa";
    if (!tree_part.empty()) {
        if (!needs_tree) throw LoadError("algorithm takes no tree kind: " + text);
        spec.uses_tree = true;
        spec.tree = parse_tree_kind(tree_part);
    } else if (needs_tree) {
        spec.uses_tree = true;  // default tree kind
    }
    if (spec.committee > 1 && !needs_tree)
        throw LoadError("committees are only defined for tree-based algorithms: " + text);
    return spec;
}

// Batch run of one algorithm on one binary task.
inline std::vector<std::int8_t> run_algo(const Graph& g, const AlgoSpec& spec,
                                         const std::vector<std::pair<int, std::int8_t>>& train,
                                         const std::vector<int>& test, RngStream& rng) {
    if (spec.algo == "wta" || spec.algo == "nwwta") {
        bool unit = spec.algo == "nwwta";
        if (spec.committee > 1)
            return committee_predict(g, spec.tree, spec.committee, train, test, rng, unit);
        SpanningTree t = sample_tree(g, spec.tree, rng);
        LineGraph l = linearize(t);
        if (unit) l = with_unit_weights(l);
        return run_batch(l, train, test);
    }
    if (spec.algo == "gpa") {
        std::vector<std::int8_t> out;
        std::vector<int> votes(test.size(), 0);
        for (int member = 0; member < spec.committee; ++member) {
            RngStream stream = rng.substream(member);
            SpanningTree t = sample_tree(g, spec.tree, stream);
            std::vector<std::int8_t> preds = graph_perceptron_batch(t, train, test);
            for (size_t i = 0; i < test.size(); ++i) votes[i] += preds[i];
        }
        out.resize(test.size());
        for (size_t i = 0; i < test.size(); ++i) out[i] = votes[i] > 0 ? +1 : -1;
        return out;
    }
    Labeling revealed(g.node_count());
    for (auto [v, label] : train) revealed.values[v] = label;
    std::vector<std::int8_t> out;
    out.reserve(test.size());
    if (spec.algo == "wmv") {
        for (int v : test) out.push_back(wmv_predict(g, revealed, v));
        return out;
    }
    // labprop
    LabPropResult res = label_propagation(g, revealed);
    for (int v : test) out.push_back(res.labels[v]);
    return out;
}

struct BenchmarkConfig {
    std::string dataset_name = "dataset";
    std::string graph_path;     // edge-list source, or
    std::string features_path;  // feature CSV with class column
    int knn_k = 10;
    std::string labels_path;  // "node class" lines (needed with graph_path)
    std::vector<AlgoSpec> algos;
    std::vector<double> fractions;
    std::vector<std::uint64_t> seeds;
    int permutations = 1;  // independent splits per seed
};

// key=value config, one per line, '#' comments. Lists are comma-separated.
inline BenchmarkConfig parse_benchmark_config(std::istream& in) {
    BenchmarkConfig cfg;
    std::string raw;
    int line_no = 0;
    auto split_list = [](const std::string& s) {
        std::vector<std::string> out;
        std::string item;
        std::istringstream ss(s);
        while (std::getline(ss, item, ',')) {
            size_t a = item.find_first_not_of(" \t\r");
            if (a == std::string::npos) continue;
            size_t b = item.find_last_not_of(" \t\r");
            out.push_back(item.substr(a, b - a + 1));
        }
        return out;
    };
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw.substr(0, raw.find('#'));
        auto eq = line.find('=');
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (eq == std::string::npos)
            throw LoadError("expected key=value at line " + std::to_string(line_no));
        auto trim = [](std::string s) {
            size_t a = s.find_first_not_of(" \t\r");
            size_t b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "name") cfg.dataset_name = value;
            else if (key == "graph") cfg.graph_path = value;
            else if (key == "features") cfg.features_path = value;
            else if (key == "knn_k") cfg.knn_k = std::stoi(value);
            else if (key == "labels") cfg.labels_path = value;
            else if (key == "permutations") cfg.permutations = std::stoi(value);
            else if (key == "algos")
                for (const auto& a : split_list(value)) cfg.algos.push_back(parse_algo_spec(a));
            else if (key == "fractions")
                for (const auto& f : split_list(value)) cfg.fractions.push_back(std::stod(f));
            else if (key == "seeds")
                for (const auto& s : split_list(value)) cfg.seeds.push_back(std::stoull(s));
            else throw LoadError("unknown config key '" + key + "' at line " + std::to_string(line_no));
        } catch (const LoadError&) {
            throw;
        } catch (const std::exception&) {
            throw LoadError("bad value for '" + key + "' at line " + std::to_string(line_no));
        }
    }
    if (cfg.algos.empty()) throw LoadError("config declares no algorithms");
    if (cfg.fractions.empty()) cfg.fractions = {0.25};
    if (cfg.seeds.empty()) cfg.seeds = {1};
    for (double f : cfg.fractions)
        if (f <= 0.0 || f >= 1.0) throw LoadError("train fraction must lie in (0,1)");
    if (cfg.permutations < 1) throw LoadError("permutations must be >= 1");
    return cfg;
}

struct BenchmarkRow {
    std::string dataset;
    std::string algo;
    std::string tree;
    double split = 0.0;
    std::uint64_t seed = 0;
    double error = 0.0;
    double f_measure = 0.0;
    bool failed = false;
    std::string failure;
};

struct MetricsReport {
    std::vector<BenchmarkRow> rows;

    // macro average over rows of one (algo, split) cell; failures excluded
    std::pair<double, double> macro_average(const std::string& algo, double split) const {
        double err = 0.0, f = 0.0;
        int count = 0;
        for (const auto& r : rows) {
            if (r.failed || r.algo != algo || r.split != split) continue;
            err += r.error;
            f += r.f_measure;
            ++count;
        }
        if (count == 0) return {0.0, 0.0};
        return {err / count, f / count};
    }
};

inline void write_benchmark_csv(const MetricsReport& report, std::ostream& out) {
    out << "dataset,algo,tree,split,seed,error,f1\n";
    char buf[64];
    auto num = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.6g", x);
        return std::string(buf);
    };
    for (const auto& r : report.rows) {
        if (r.failed) {
            out << "# error: " << r.dataset << ',' << r.algo << ",split=" << num(r.split)
                << ",seed=" << r.seed << ": " << r.failure << '\n';
            continue;
        }
        out << r.dataset << ',' << r.algo << ',' << r.tree << ',' << num(r.split) << ',' << r.seed
            << ',' << num(r.error) << ',' << num(r.f_measure) << '\n';
    }
}

// Full grid: binary one-vs-rest task per distinct class x split fraction x
// seed x permutation x algorithm. Component failures become error rows and
// the run continues.
inline MetricsReport run_benchmark(const Graph& g, const std::vector<int>& classes,
                                   const BenchmarkConfig& cfg) {
    if (static_cast<int>(classes.size()) != g.node_count())
        throw ContractError("run_benchmark: class vector length mismatch");
    std::vector<int> distinct(classes);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    // a single class still defines one (degenerate) task; two classes are one
    // task each way, so keep only the positive side when there are exactly two
    if (distinct.size() == 2) distinct.pop_back();

    MetricsReport report;
    const int n = g.node_count();
    for (int cls : distinct) {
        Labeling y(n);
        for (int v = 0; v < n; ++v) y.values[v] = classes[v] == cls ? +1 : -1;
        std::string dataset =
            cfg.dataset_name + (distinct.size() > 1 ? "/" + std::to_string(cls) : "");
        for (double fraction : cfg.fractions) {
            for (std::uint64_t seed : cfg.seeds) {
                for (int perm = 0; perm < cfg.permutations; ++perm) {
                    RngStream split_rng(seed, 1000 + perm);
                    Split split = make_split(n, fraction, split_rng);
                    std::vector<std::pair<int, std::int8_t>> train;
                    train.reserve(split.train.size());
                    for (int v : split.train) train.push_back({v, y.values[v]});
                    std::vector<std::int8_t> truth;
                    truth.reserve(split.test.size());
                    for (int v : split.test) truth.push_back(y.values[v]);
                    for (size_t ai = 0; ai < cfg.algos.size(); ++ai) {
                        const AlgoSpec& spec = cfg.algos[ai];
                        BenchmarkRow row;
                        row.dataset = dataset;
                        row.algo = spec.name();
                        row.tree = spec.uses_tree ? tree_kind_name(spec.tree) : "-";
                        row.split = fraction;
                        row.seed = seed;
                        try {
                            RngStream algo_rng(seed, 2000 + 100 * perm + static_cast<int>(ai));
                            std::vector<std::int8_t> preds =
                                run_algo(g, spec, train, split.test, algo_rng);
                            Metrics m = evaluate(preds, truth);
                            row.error = m.error;
                            row.f_measure = m.f_measure;
                        } catch (const std::exception& e) {
                            row.failed = true;
                            row.failure = e.what();
                        }
                        report.rows.push_back(std::move(row));
                    }
                }
            }
        }
    }
    return report;
}

// Planted two-cluster benchmark graph: two equal communities with dense
// heavy intra-cluster edges and sparse light inter-cluster edges, labels
// +1 / -1 by community with optional flip noise. A spanning backbone keeps
// the graph connected at any density.
struct SyntheticConfig {
    int n = 400;
    double intra_prob = 0.05;
    double inter_prob = 0.01;
    double intra_weight = 2.0;
    double inter_weight = 0.5;
    double label_noise = 0.05;
};

inline std::pair<Graph, Labeling> synthetic_two_cluster(const SyntheticConfig& cfg,
                                                        RngStream& rng) {
    if (cfg.n < 4 || cfg.n % 2 != 0)
        throw ContractError("synthetic_two_cluster: n must be even and >= 4");
    const int half = cfg.n / 2;
    std::set<std::pair<int, int>> used;
    std::vector<Edge> edges;
    auto add = [&](int u, int v, double w) {
        if (u > v) std::swap(u, v);
        if (used.insert({u, v}).second) edges.push_back({u, v, w});
    };
    // backbone: a path through each cluster and one bridge
    for (int v = 1; v < half; ++v) add(v - 1, v, cfg.intra_weight);
    for (int v = half + 1; v < cfg.n; ++v) add(v - 1, v, cfg.intra_weight);
    add(half - 1, half, cfg.inter_weight);
    for (int u = 0; u < cfg.n; ++u) {
        for (int v = u + 1; v < cfg.n; ++v) {
            bool same = (u < half) == (v < half);
            double prob = same ? cfg.intra_prob : cfg.inter_prob;
            if (rng.uniform01() < prob) add(u, v, same ? cfg.intra_weight : cfg.inter_weight);
        }
    }
    Labeling y(cfg.n);
    for (int v = 0; v < cfg.n; ++v) {
        std::int8_t base = v < half ? +1 : -1;
        if (rng.uniform01() < cfg.label_noise) base = static_cast<std::int8_t>(-base);
        y.values[v] = base;
    }
    return {Graph(cfg.n, edges), y};
}

}  // namespace wta

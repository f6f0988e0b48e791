// Command-line surface for the spanning-tree node classification toolkit.
//
// Subcommands: build-knn, tree, predict, committee, adversary, bench.
// Exit codes: 0 success, 2 bad input (files, formats, arguments),
// 3 runtime failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "wta/bounds.hpp"
#include "wta/harness.hpp"
#include "wta/knn.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitRuntime = 3;

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw wta::LoadError("cannot open " + path);
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw wta::LoadError("cannot open " + path + " for writing");
    return out;
}

wta::Graph load_graph_file(const std::string& path) {
    auto in = open_input(path);
    return wta::load_graph(in);
}

wta::Labeling load_binary_labels(const std::string& path, int n) {
    auto in = open_input(path);
    return wta::binary_labeling(wta::load_label_file(in), n);
}

int cmd_build_knn(const std::string& input, int k, bool has_class, const std::string& out_path) {
    auto in = open_input(input);
    wta::FeatureMatrix fm = wta::load_features(in, has_class);
    wta::Graph g = wta::build_knn_graph(fm, k);
    auto out = open_output(out_path);
    wta::save_graph(g, out);
    std::cout << "wrote " << g.node_count() << " nodes, " << g.edge_count() << " edges to "
              << out_path << "\n";
    return kExitOk;
}

int cmd_tree(const std::string& kind_name, const std::string& graph_path, std::uint64_t seed,
             int num_roots, const std::string& out_path) {
    wta::TreeKind kind = wta::parse_tree_kind(kind_name);
    wta::Graph g = load_graph_file(graph_path);
    wta::RngStream rng(seed);
    wta::SpanningTree t = wta::sample_tree(g, kind, rng, num_roots);
    auto out = open_output(out_path);
    wta::save_tree(t, out);
    std::cout << "wrote " << wta::tree_kind_name(kind) << " tree (" << t.node_count()
              << " nodes, diameter " << wta::tree_diameter(t) << ") to " << out_path << "\n";
    return kExitOk;
}

std::string spec_text(int committee, std::string algo, const std::string& tree_kind) {
    std::transform(algo.begin(), algo.end(), algo.begin(), ::tolower);
    std::string text = committee > 1 ? std::to_string(committee) + "*" + algo : algo;
    if (algo == "wta" || algo == "nwwta" || algo == "gpa") text += "+" + tree_kind;
    return text;
}

int run_predict(const std::string& algo_text, const std::string& graph_path,
                const std::string& labels_path, double train_frac, std::uint64_t seed,
                const std::string& out_path) {
    wta::AlgoSpec spec = wta::parse_algo_spec(algo_text);
    wta::Graph g = load_graph_file(graph_path);
    wta::Labeling y = load_binary_labels(labels_path, g.node_count());
    y.require_known("predict");

    wta::RngStream split_rng(seed, 1);
    wta::Split split = wta::make_split(g.node_count(), train_frac, split_rng);
    std::vector<std::pair<int, std::int8_t>> train;
    for (int v : split.train) train.push_back({v, y.values[v]});
    wta::RngStream algo_rng(seed, 2);
    std::vector<std::int8_t> preds = wta::run_algo(g, spec, train, split.test, algo_rng);
    std::vector<std::int8_t> truth;
    for (int v : split.test) truth.push_back(y.values[v]);
    wta::Metrics m = wta::evaluate(preds, truth);
    std::cout << "algo=" << spec.name() << " train_frac=" << train_frac << " seed=" << seed
              << " error=" << m.error << " f1=" << m.f_measure << "\n";
    if (!out_path.empty()) {
        auto out = open_output(out_path);
        out << "node,predicted,true\n";
        for (size_t i = 0; i < split.test.size(); ++i)
            out << split.test[i] << ',' << int(preds[i]) << ',' << int(truth[i]) << '\n';
    }
    return kExitOk;
}

int cmd_adversary(const std::string& graph_path, int budget, std::uint64_t seed,
                  const std::string& labels_out, const std::string& meta_out) {
    wta::Graph g = load_graph_file(graph_path);
    wta::RngStream rng(seed);
    wta::AdversarialInstance inst = wta::adversarial_labeling(g, budget, rng);

    if (!labels_out.empty()) {
        auto out = open_output(labels_out);
        for (int v = 0; v < g.node_count(); ++v)
            out << v << ' ' << int(inst.labeling.values[v]) << '\n';
    }
    nlohmann::json meta;
    meta["budget"] = inst.budget;
    meta["hard_nodes"] = inst.hard_nodes;
    meta["p_cutsize"] = inst.p_cutsize;
    meta["seed"] = seed;
    if (!meta_out.empty()) {
        auto out = open_output(meta_out);
        out << meta.dump(2) << '\n';
    }
    std::cout << meta.dump(2) << '\n';
    return kExitOk;
}

int cmd_bench(const std::string& config_path, const std::string& out_path) {
    auto cfg_in = open_input(config_path);
    wta::BenchmarkConfig cfg = wta::parse_benchmark_config(cfg_in);

    wta::Graph g;
    std::vector<int> classes;
    if (!cfg.graph_path.empty()) {
        g = load_graph_file(cfg.graph_path);
        if (cfg.labels_path.empty()) throw wta::LoadError("bench config needs labels= with graph=");
        auto lin = open_input(cfg.labels_path);
        classes.assign(g.node_count(), 0);
        std::vector<char> seen(g.node_count(), 0);
        for (auto [u, c] : wta::load_label_file(lin)) {
            if (u >= g.node_count()) throw wta::LoadError("label for unknown node");
            classes[u] = c;
            seen[u] = 1;
        }
        for (char s : seen)
            if (!s) throw wta::LoadError("bench requires a class for every node");
    } else if (!cfg.features_path.empty()) {
        auto fin = open_input(cfg.features_path);
        wta::FeatureMatrix fm = wta::load_features(fin, /*has_class=*/true);
        if (fm.classes.empty()) throw wta::LoadError("feature file has no class column");
        g = wta::build_knn_graph(fm, cfg.knn_k);
        classes = fm.classes;
    } else {
        throw wta::LoadError("bench config needs graph= or features=");
    }

    wta::MetricsReport report = wta::run_benchmark(g, classes, cfg);
    auto out = open_output(out_path);
    wta::write_benchmark_csv(report, out);
    std::cout << "wrote " << report.rows.size() << " rows to " << out_path << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online and batch node classification on graphs via random spanning trees"};
    app.require_subcommand(1);

    // build-knn
    auto* knn = app.add_subcommand("build-knn", "Build a Gaussian-weighted k-NN graph from features");
    std::string knn_input, knn_out = "graph.el";
    int knn_k = 10;
    bool knn_class = false;
    knn->add_option("--input", knn_input, "feature CSV")->required();
    knn->add_option("--k", knn_k, "neighbors per node");
    knn->add_flag("--class-column", knn_class, "last column is a class id");
    knn->add_option("--out", knn_out, "output edge list");

    // tree
    auto* tree = app.add_subcommand("tree", "Sample or construct a spanning tree");
    std::string tree_kind = "rst", tree_graph, tree_out = "tree.txt";
    std::uint64_t tree_seed = 1;
    int tree_roots = 10;
    tree->add_option("--kind", tree_kind, "rst|nwrst|dfst|mst|spst")->required();
    tree->add_option("--graph", tree_graph, "edge-list file")->required();
    tree->add_option("--seed", tree_seed, "random seed");
    tree->add_option("--num-roots", tree_roots, "candidate roots for spst");
    tree->add_option("--out", tree_out, "output tree file");

    // predict
    auto* predict = app.add_subcommand("predict", "Train/test evaluation of one predictor");
    std::string p_algo = "wta", p_graph, p_labels, p_tree = "rst", p_out;
    double p_frac = 0.25;
    std::uint64_t p_seed = 1;
    predict->add_option("--algo", p_algo, "wta|nwwta|wmv|labprop|gpa");
    predict->add_option("--graph", p_graph, "edge-list file")->required();
    predict->add_option("--labels", p_labels, "label file (u +/-1 lines)")->required();
    predict->add_option("--tree-kind", p_tree, "tree kind for tree-based algorithms");
    predict->add_option("--train-frac", p_frac, "train fraction in (0,1)");
    predict->add_option("--seed", p_seed, "random seed");
    predict->add_option("--out", p_out, "prediction CSV");

    // committee
    auto* committee = app.add_subcommand("committee", "Majority vote over independent trees");
    std::string c_graph, c_labels, c_tree = "rst", c_out, c_algo = "wta";
    int c_size = 7;
    double c_frac = 0.25;
    std::uint64_t c_seed = 1;
    committee->add_option("--size", c_size, "odd committee size");
    committee->add_option("--algo", c_algo, "wta|nwwta|gpa");
    committee->add_option("--graph", c_graph, "edge-list file")->required();
    committee->add_option("--labels", c_labels, "label file")->required();
    committee->add_option("--tree-kind", c_tree, "tree kind");
    committee->add_option("--train-frac", c_frac, "train fraction in (0,1)");
    committee->add_option("--seed", c_seed, "random seed");
    committee->add_option("--out", c_out, "prediction CSV");

    // adversary
    auto* adversary = app.add_subcommand("adversary", "Generate a hard labeling with budget K");
    std::string a_graph, a_labels_out, a_meta_out;
    int a_budget = 1;
    std::uint64_t a_seed = 1;
    adversary->add_option("--graph", a_graph, "edge-list file")->required();
    adversary->add_option("--budget", a_budget, "number of adversarially labeled nodes")->required();
    adversary->add_option("--seed", a_seed, "random seed");
    adversary->add_option("--out", a_labels_out, "output label file");
    adversary->add_option("--meta", a_meta_out, "output JSON metadata");

    // bench
    auto* bench = app.add_subcommand("bench", "Run a benchmark grid from a config file");
    std::string b_config, b_out = "results.csv";
    bench->add_option("--config", b_config, "key=value config file")->required();
    bench->add_option("--out", b_out, "output CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitInput;
    }

    try {
        if (knn->parsed()) return cmd_build_knn(knn_input, knn_k, knn_class, knn_out);
        if (tree->parsed()) return cmd_tree(tree_kind, tree_graph, tree_seed, tree_roots, tree_out);
        if (predict->parsed())
            return run_predict(spec_text(1, p_algo, p_tree), p_graph, p_labels, p_frac, p_seed,
                               p_out);
        if (committee->parsed())
            return run_predict(spec_text(c_size, c_algo, c_tree), c_graph, c_labels, c_frac,
                               c_seed, c_out);
        if (adversary->parsed())
            return cmd_adversary(a_graph, a_budget, a_seed, a_labels_out, a_meta_out);
        if (bench->parsed()) return cmd_bench(b_config, b_out);
    } catch (const wta::LoadError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

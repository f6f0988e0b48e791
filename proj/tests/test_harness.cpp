#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "oracles.hpp"
#include "wta/harness.hpp"

using namespace wta;

TEST_CASE("make_split: sizes, determinism, degenerate cases") {
    RngStream a(11, 0), b(11, 0);
    Split s1 = make_split(100, 0.25, a);
    Split s2 = make_split(100, 0.25, b);
    CHECK(s1.train.size() == 25);
    CHECK(s1.test.size() == 75);
    CHECK(s1.train == s2.train);
    CHECK(s1.test == s2.test);
    std::vector<char> seen(100, 0);
    for (int v : s1.train) seen[v] = 1;
    for (int v : s1.test) {
        CHECK(!seen[v]);
        seen[v] = 1;
    }
    for (char c : seen) CHECK(c == 1);
    CHECK(std::is_sorted(s1.train.begin(), s1.train.end()));
    RngStream c(12);
    CHECK_THROWS_AS(make_split(100, 0.0, c), ContractError);
    CHECK_THROWS_AS(make_split(100, 1.0, c), ContractError);
    CHECK_THROWS_AS(make_split(3, 0.01, c), ContractError);  // rounds to empty train
}

TEST_CASE("evaluate: hand-computed confusion matrix") {
    std::vector<std::int8_t> truth{+1, +1, +1, -1, -1, -1};
    SUBCASE("perfect predictions") {
        Metrics m = evaluate(truth, truth);
        CHECK(m.error == doctest::Approx(0.0));
        CHECK(m.f_measure == doctest::Approx(1.0));
    }
    SUBCASE("all wrong") {
        std::vector<std::int8_t> flipped;
        for (std::int8_t t : truth) flipped.push_back(static_cast<std::int8_t>(-t));
        Metrics m = evaluate(flipped, truth);
        CHECK(m.error == doctest::Approx(1.0));
        CHECK(m.f_measure == doctest::Approx(0.0));
    }
    SUBCASE("mixed: tp=2 fp=1 fn=1") {
        std::vector<std::int8_t> pred{+1, +1, -1, +1, -1, -1};
        Metrics m = evaluate(pred, truth);
        CHECK(m.error == doctest::Approx(2.0 / 6.0));
        // precision 2/3, recall 2/3 -> F = 2/3
        CHECK(m.f_measure == doctest::Approx(2.0 / 3.0));
    }
    SUBCASE("contracts") {
        CHECK_THROWS_AS(evaluate({}, {}), ContractError);
        CHECK_THROWS_AS(evaluate({+1}, truth), ContractError);
    }
}

TEST_CASE("parse_algo_spec: valid forms") {
    AlgoSpec a = parse_algo_spec("17*WTA+RST");
    CHECK(a.algo == "wta");
    CHECK(a.committee == 17);
    CHECK(a.uses_tree);
    CHECK(a.tree == TreeKind::RST);
    CHECK(a.name() == "17*wta+rst");

    AlgoSpec b = parse_algo_spec("labprop");
    CHECK(b.algo == "labprop");
    CHECK_FALSE(b.uses_tree);
    CHECK(b.committee == 1);

    AlgoSpec c = parse_algo_spec("nwwta+mst");
    CHECK(c.algo == "nwwta");
    CHECK(c.tree == TreeKind::MST);

    AlgoSpec d = parse_algo_spec("wta");  // defaults to RST
    CHECK(d.uses_tree);
    CHECK(d.tree == TreeKind::RST);

    AlgoSpec e = parse_algo_spec("gpa+spst");
    CHECK(e.tree == TreeKind::SPST);
}

TEST_CASE("parse_algo_spec: rejections") {
    CHECK_THROWS_AS(parse_algo_spec("4*wta+rst"), LoadError);   // even committee
    CHECK_THROWS_AS(parse_algo_spec("x*wta"), LoadError);       // non-numeric committee
    CHECK_THROWS_AS(parse_algo_spec("perceptron"), LoadError);  // unknown algorithm
    CHECK_THROWS_AS(parse_algo_spec("wmv+rst"), LoadError);     // tree on a non-tree algo
    CHECK_THROWS_AS(parse_algo_spec("3*labprop"), LoadError);   // committee on non-tree algo
    CHECK_THROWS_AS(parse_algo_spec("wta+xyz"), LoadError);     // unknown tree kind
}

TEST_CASE("load_features: parsing and errors") {
    std::istringstream ok("1.0, 2.0, 0\n# comment\n3.0 4.0 1\n");
    FeatureMatrix fm = load_features(ok, true);
    CHECK(fm.row_count() == 2);
    CHECK(fm.column_count() == 2);
    CHECK(fm.classes == std::vector<int>{0, 1});
    std::istringstream ragged("1 2 0\n1 2 3 0\n");
    CHECK_THROWS_AS(load_features(ragged, true), LoadError);
    std::istringstream badclass("1 2 0.5\n");
    CHECK_THROWS_AS(load_features(badclass, true), LoadError);
    std::istringstream noclass("1 2\n3 4\n");
    FeatureMatrix plain = load_features(noclass, false);
    CHECK(plain.classes.empty());
    CHECK(plain.row_count() == 2);
}

TEST_CASE("build_knn_graph: hand-computed five-point fixture") {
    // 1-D points 0, 1, 2, 10, 11 with k = 2
    FeatureMatrix fm;
    fm.rows = {{0.0}, {1.0}, {2.0}, {10.0}, {11.0}};
    Graph g = build_knn_graph(fm, 2);
    // sigma2: node 0 -> (1+4)/2 = 2.5; node 1 -> (1+1)/2 = 1; node 2 -> (1+4)/2 = 2.5
    // node 3 -> (1+64)/2 = 32.5; node 4 -> (1+81)/2 = 41
    // edge 0-1: d2=1, s2=(2.5+1)/2 = 1.75 -> w = exp(-1/1.75)
    bool found01 = false, found34 = false, found23 = false;
    for (int id = 0; id < g.edge_count(); ++id) {
        const Edge& e = g.edge(id);
        if (e.u == 0 && e.v == 1) {
            found01 = true;
            CHECK(e.w == doctest::Approx(std::exp(-1.0 / 1.75)).epsilon(1e-9));
        }
        if (e.u == 3 && e.v == 4) {
            found34 = true;
            CHECK(e.w == doctest::Approx(std::exp(-1.0 / 36.75)).epsilon(1e-9));
        }
        if (e.u == 2 && e.v == 3) found23 = true;  // 3's 2-NN are {4, 2}
    }
    CHECK(found01);
    CHECK(found34);
    CHECK(found23);
    CHECK_THROWS_AS(build_knn_graph(fm, 5), ContractError);
    CHECK_THROWS_AS(build_knn_graph(fm, 0), ContractError);
}

TEST_CASE("build_knn_graph: coincident points get weight one") {
    FeatureMatrix fm;
    fm.rows = {{3.0, 3.0}, {3.0, 3.0}, {3.0, 3.0}};
    Graph g = build_knn_graph(fm, 1);
    for (int id = 0; id < g.edge_count(); ++id) CHECK(g.edge(id).w == doctest::Approx(1.0));
}

TEST_CASE("build_knn_graph: far clusters stay unlinked at small k") {
    FeatureMatrix fm;
    fm.rows = {{0.0}, {0.1}, {0.2}, {100.0}, {100.1}, {100.2}};
    Graph g = build_knn_graph(fm, 2);
    for (int id = 0; id < g.edge_count(); ++id) {
        const Edge& e = g.edge(id);
        CHECK((e.u < 3) == (e.v < 3));
    }
    CHECK_FALSE(g.connected());
}

TEST_CASE("parse_benchmark_config: round trip and validation") {
    std::istringstream ok(
        "name = demo    # dataset label\n"
        "graph = g.txt\n"
        "labels = y.txt\n"
        "algos = wta+rst, 3*nwwta+mst, labprop\n"
        "fractions = 0.1, 0.5\n"
        "seeds = 1, 2, 3\n"
        "permutations = 4\n");
    BenchmarkConfig cfg = parse_benchmark_config(ok);
    CHECK(cfg.dataset_name == "demo");
    CHECK(cfg.graph_path == "g.txt");
    CHECK(cfg.algos.size() == 3);
    CHECK(cfg.algos[1].committee == 3);
    CHECK(cfg.fractions == std::vector<double>{0.1, 0.5});
    CHECK(cfg.seeds == std::vector<std::uint64_t>{1, 2, 3});
    CHECK(cfg.permutations == 4);

    std::istringstream unknown("algos = wta\nbogus = 1\n");
    CHECK_THROWS_AS(parse_benchmark_config(unknown), LoadError);
    std::istringstream badfrac("algos = wta\nfractions = 1.5\n");
    CHECK_THROWS_AS(parse_benchmark_config(badfrac), LoadError);
    std::istringstream noalgos("fractions = 0.5\n");
    CHECK_THROWS_AS(parse_benchmark_config(noalgos), LoadError);
    std::istringstream noeq("algos = wta\njust words\n");
    CHECK_THROWS_AS(parse_benchmark_config(noeq), LoadError);
}

TEST_CASE("run_algo: every algorithm produces hard labels on a shared task") {
    RngStream rng(21);
    Graph g = oracle::random_connected_graph(40, 30, rng);
    std::vector<std::pair<int, std::int8_t>> train;
    std::vector<int> test;
    for (int v = 0; v < 40; ++v) {
        if (v % 3 == 0)
            train.push_back({v, v % 2 ? std::int8_t(-1) : std::int8_t(+1)});
        else
            test.push_back(v);
    }
    for (const char* text : {"wta+rst", "nwwta+nwrst", "3*wta+mst", "gpa+rst", "wmv", "labprop"}) {
        AlgoSpec spec = parse_algo_spec(text);
        RngStream algo_rng(5, 7);
        auto preds = run_algo(g, spec, train, test, algo_rng);
        REQUIRE(preds.size() == test.size());
        for (std::int8_t p : preds) CHECK((p == +1 || p == -1));
    }
}

TEST_CASE("run_benchmark: grid shape, determinism, macro averages") {
    RngStream rng(22);
    Graph g = oracle::random_connected_graph(30, 20, rng);
    std::vector<int> classes(30);
    for (int v = 0; v < 30; ++v) classes[v] = v < 15 ? 0 : 1;

    BenchmarkConfig cfg;
    cfg.dataset_name = "toy";
    cfg.algos = {parse_algo_spec("wta+rst"), parse_algo_spec("wmv")};
    cfg.fractions = {0.3, 0.6};
    cfg.seeds = {1, 2};
    cfg.permutations = 2;
    MetricsReport rep = run_benchmark(g, classes, cfg);
    // two classes -> one one-vs-rest task; 2 fractions x 2 seeds x 2 perms x 2 algos
    CHECK(rep.rows.size() == 16);
    for (const auto& r : rep.rows) CHECK_FALSE(r.failed);

    MetricsReport rep2 = run_benchmark(g, classes, cfg);
    std::ostringstream csv1, csv2;
    write_benchmark_csv(rep, csv1);
    write_benchmark_csv(rep2, csv2);
    CHECK(csv1.str() == csv2.str());  // byte-stable rerun
    CHECK(csv1.str().substr(0, 38) == "dataset,algo,tree,split,seed,error,f1\n");

    auto [err, f] = rep.macro_average("wta+rst", 0.3);
    double manual_err = 0.0;
    int count = 0;
    for (const auto& r : rep.rows)
        if (r.algo == "wta+rst" && r.split == 0.3) {
            manual_err += r.error;
            ++count;
        }
    CHECK(count == 4);
    CHECK(err == doctest::Approx(manual_err / count));
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
}

TEST_CASE("run_benchmark: three classes give one task per class") {
    RngStream rng(23);
    Graph g = oracle::random_connected_graph(24, 12, rng);
    std::vector<int> classes(24);
    for (int v = 0; v < 24; ++v) classes[v] = v % 3;
    BenchmarkConfig cfg;
    cfg.algos = {parse_algo_spec("wmv")};
    cfg.fractions = {0.5};
    cfg.seeds = {9};
    MetricsReport rep = run_benchmark(g, classes, cfg);
    CHECK(rep.rows.size() == 3);
    std::set<std::string> datasets;
    for (const auto& r : rep.rows) datasets.insert(r.dataset);
    CHECK(datasets.size() == 3);
}

TEST_CASE("run_benchmark: component failure becomes an error row") {
    // two disconnected halves: labprop requires connectivity and must fail,
    // wmv does not and must succeed
    std::vector<Edge> edges{{0, 1, 1.0}, {2, 3, 1.0}};
    Graph g(4, std::move(edges));
    std::vector<int> classes{0, 0, 1, 1};
    BenchmarkConfig cfg;
    cfg.algos = {parse_algo_spec("labprop"), parse_algo_spec("wmv")};
    cfg.fractions = {0.5};
    cfg.seeds = {1};
    MetricsReport rep = run_benchmark(g, classes, cfg);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.rows[0].failed);
    CHECK_FALSE(rep.rows[1].failed);
    std::ostringstream csv;
    write_benchmark_csv(rep, csv);
    CHECK(csv.str().find("# error:") != std::string::npos);
}

TEST_CASE("synthetic_two_cluster: connected, labeled, deterministic") {
    SyntheticConfig cfg;
    cfg.n = 100;
    RngStream a(31, 0), b(31, 0);
    auto [g1, y1] = synthetic_two_cluster(cfg, a);
    auto [g2, y2] = synthetic_two_cluster(cfg, b);
    CHECK(g1.connected());
    CHECK(g1.node_count() == 100);
    CHECK(g1.edge_count() == g2.edge_count());
    CHECK(y1.values == y2.values);
    for (std::int8_t v : y1.values) CHECK((v == +1 || v == -1));
    int flips = 0;
    for (int v = 0; v < 100; ++v)
        if (y1.values[v] != (v < 50 ? +1 : -1)) ++flips;
    CHECK(flips < 20);  // noise rate 5%, crude bound
    SyntheticConfig bad;
    bad.n = 5;
    RngStream c(32);
    CHECK_THROWS_AS(synthetic_two_cluster(bad, c), ContractError);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <sstream>

#include "oracles.hpp"
#include "wta/predictor.hpp"

using namespace wta;

namespace {

LineGraph make_line(std::vector<double> weights) {
    LineGraph l;
    int n = static_cast<int>(weights.size()) + 1;
    l.order.resize(n);
    std::iota(l.order.begin(), l.order.end(), 0);
    l.edge_weights = std::move(weights);
    l.prefix_resistance.resize(n);
    l.prefix_resistance[0] = 0.0L;
    for (int i = 1; i < n; ++i)
        l.prefix_resistance[i] = l.prefix_resistance[i - 1] + 1.0L / l.edge_weights[i - 1];
    return l;
}

}  // namespace

TEST_CASE("index tree sizing: padded to the next power of two") {
    CHECK(PredictorState(make_line({})).leaf_slots() == 1);
    std::vector<double> w26(26, 1.0);
    CHECK(PredictorState(make_line(w26)).leaf_slots() == 32);  // 27 nodes
    std::vector<double> w15(15, 1.0);
    CHECK(PredictorState(make_line(w15)).leaf_slots() == 16);  // exact power of two
}

TEST_CASE("predict: cold start is +1; contract violations throw") {
    LineGraph l = make_line({1.0, 1.0});
    PredictorState s(l);
    CHECK(s.predict(1) == +1);
    s.reveal(1, -1);
    CHECK_THROWS_AS(s.predict(1), ContractError);
    CHECK_THROWS_AS(s.reveal(1, -1), ContractError);
    CHECK_THROWS_AS(s.reveal(0, 0), ContractError);
    CHECK_THROWS_AS(s.predict(9), ContractError);
}

TEST_CASE("predict: two-candidate resistance comparison") {
    // line a-b-c, weights (1,4): d(b,a)=1 > d(b,c)=0.25
    LineGraph l = make_line({1.0, 4.0});
    PredictorState s(l);
    s.reveal(0, +1);
    s.reveal(2, -1);
    CHECK(s.predict(1) == -1);
}

TEST_CASE("predict: equidistant neighbors") {
    LineGraph l = make_line({2.0, 2.0});
    SUBCASE("equal labels win regardless of tie rule") {
        PredictorState s(l);
        s.reveal(0, -1);
        s.reveal(2, -1);
        CHECK(s.predict(1) == -1);
    }
    SUBCASE("differing labels: the left neighbor wins the tie") {
        PredictorState s(l);
        s.reveal(0, +1);
        s.reveal(2, -1);
        CHECK(s.predict(1) == +1);
    }
}

TEST_CASE("reveal: linked list saturation and first-reveal marking") {
    LineGraph l = make_line({1.0, 1.0, 1.0});
    PredictorState s(l);
    s.reveal(0, +1);
    CHECK(s.revealed_count() == 1);
    s.reveal(3, -1);
    s.reveal(1, +1);  // inserted between revealed 0 and 3
    CHECK(s.predict(2) == +1);  // d(2,1) = d(2,3) = 1: tie goes left, label +1
}

TEST_CASE("predictions match a brute-force nearest-neighbor oracle") {
    RngStream rng(61);
    for (int it = 0; it < 200; ++it) {
        int n = 2 + static_cast<int>(rng.uniform_index(64));
        std::vector<double> w(n - 1);
        for (auto& x : w) x = 0.2 + 2.8 * rng.uniform01();
        LineGraph l = make_line(std::move(w));
        PredictorState s(l);
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng.engine());
        std::vector<int> revealed_pos;
        std::vector<std::int8_t> revealed_label;
        for (int pos : order) {
            int expected = oracle::brute_force_nn_label(l, revealed_pos, revealed_label, pos);
            if (expected == 0) expected = +1;
            CHECK(s.predict(pos) == expected);
            std::int8_t label = rng.uniform01() < 0.5 ? -1 : +1;
            s.reveal(pos, label);
            revealed_pos.push_back(pos);
            revealed_label.push_back(label);
        }
    }
}

TEST_CASE("run_online: uniform labels make at most one mistake") {
    RngStream rng(62);
    for (int it = 0; it < 20; ++it) {
        int n = 2 + static_cast<int>(rng.uniform_index(40));
        SpanningTree t = oracle::random_tree(n, rng);
        LineGraph l = linearize(t);
        Labeling y(n);
        std::int8_t sign = it % 2 ? +1 : -1;
        for (auto& v : y.values) v = sign;
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng.engine());
        OnlineTrace trace = run_online(l, y, order);
        CHECK(trace.mistakes <= 1);
    }
}

TEST_CASE("run_online: alternating labels, left-to-right hand simulation") {
    LineGraph l = make_line({1, 1, 1, 1, 1});
    Labeling y(6);
    for (int v = 0; v < 6; ++v) y.values[v] = v % 2 ? -1 : +1;
    std::vector<int> order{0, 1, 2, 3, 4, 5};
    OnlineTrace trace = run_online(l, y, order);
    // first prediction (+1) is right; every later node is predicted from its
    // revealed left neighbor, whose label always disagrees
    CHECK(trace.mistakes == 5);
    std::vector<int> expected_pred{+1, +1, -1, +1, -1, +1};
    for (int i = 0; i < 6; ++i) CHECK(trace.steps[i].predicted == expected_pred[i]);
}

TEST_CASE("run_online: order validation and trace bookkeeping") {
    LineGraph l = make_line({1, 1});
    Labeling y(3);
    y.values = {+1, +1, -1};
    CHECK_THROWS_AS(run_online(l, y, {0, 1}), ContractError);
    CHECK_THROWS_AS(run_online(l, y, {0, 1, 1}), ContractError);
    OnlineTrace trace = run_online(l, y, {2, 0, 1});
    int counted = 0;
    for (const auto& s : trace.steps) counted += s.mistake ? 1 : 0;
    CHECK(counted == trace.mistakes);
    std::ostringstream csv;
    trace.export_csv(csv);
    CHECK(csv.str().substr(0, 36) == "step,node,predicted,true,mistake\n0,2");
}

TEST_CASE("scale invariance: traces identical under weight rescaling") {
    RngStream rng(63);
    for (double alpha : {1e-3, 1.0, 1e3}) {
        RngStream local(63);  // same tree/labels each time
        SpanningTree t = oracle::random_tree(80, local);
        Labeling y = oracle::random_labeling(80, local);
        std::vector<int> order(80);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), local.engine());

        SpanningTree scaled = t;
        for (auto& w : scaled.parent_weight) w *= alpha;
        OnlineTrace base = run_online(linearize(t), y, order);
        OnlineTrace other = run_online(linearize(scaled), y, order);
        REQUIRE(base.steps.size() == other.steps.size());
        for (size_t i = 0; i < base.steps.size(); ++i) {
            CHECK(base.steps[i].node == other.steps[i].node);
            CHECK(base.steps[i].predicted == other.steps[i].predicted);
        }
    }
}

TEST_CASE("amortized instrumentation: visits stay within 4n on full runs") {
    RngStream rng(64);
    for (int n : {64, 500, 1024}) {
        SpanningTree t = oracle::random_tree(n, rng);
        LineGraph l = linearize(t);
        Labeling y = oracle::random_labeling(n, rng);
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng.engine());
        OnlineTrace trace = run_online(l, y, order);
        CHECK(trace.index_tree_visits <= 4LL * n);
    }
}

TEST_CASE("run_batch: fixtures and contracts") {
    LineGraph l = make_line({1, 1, 1, 1, 1});
    SUBCASE("surrounded by one label") {
        auto preds = run_batch(l, {{1, -1}, {3, -1}}, {2});
        CHECK(preds == std::vector<std::int8_t>{-1});
    }
    SUBCASE("empty train predicts +1 everywhere") {
        auto preds = run_batch(l, {}, {0, 2, 5});
        CHECK(preds == std::vector<std::int8_t>{+1, +1, +1});
    }
    SUBCASE("overlap rejected") {
        CHECK_THROWS_AS(run_batch(l, {{2, +1}}, {2}), ContractError);
    }
    SUBCASE("six-node fixture matches exhaustive nearest neighbor") {
        std::vector<std::pair<int, std::int8_t>> train{{0, +1}, {4, -1}};
        auto preds = run_batch(l, train, {1, 2, 3, 5});
        // distances from revealed 0 (+1) and 4 (-1)
        CHECK(preds == std::vector<std::int8_t>{+1, +1, -1, -1});
    }
}

TEST_CASE("run_batch: train reveal order never changes the predictions") {
    RngStream rng(65);
    SpanningTree t = oracle::random_tree(40, rng);
    LineGraph l = linearize(t);
    std::vector<std::pair<int, std::int8_t>> train;
    std::vector<int> test;
    for (int v = 0; v < 40; ++v) {
        if (rng.uniform01() < 0.4)
            train.push_back({v, rng.uniform01() < 0.5 ? std::int8_t(-1) : std::int8_t(+1)});
        else
            test.push_back(v);
    }
    auto base = run_batch(l, train, test);
    for (int shuffle = 0; shuffle < 5; ++shuffle) {
        std::shuffle(train.begin(), train.end(), rng.engine());
        CHECK(run_batch(l, train, test) == base);
    }
}

TEST_CASE("committee: odd size required, k=1 equals a single batch run") {
    RngStream rng(66);
    Graph g = oracle::random_connected_graph(30, 20, rng);
    std::vector<std::pair<int, std::int8_t>> train;
    std::vector<int> test;
    for (int v = 0; v < 30; ++v) {
        if (v % 3 == 0)
            train.push_back({v, v % 2 ? std::int8_t(-1) : std::int8_t(+1)});
        else
            test.push_back(v);
    }
    RngStream c1(7, 3), c2(7, 3);
    CHECK_THROWS_AS(committee_predict(g, TreeKind::RST, 4, train, test, c1), ContractError);
    auto committee = committee_predict(g, TreeKind::RST, 1, train, test, c1);
    RngStream member = c2.substream(0);
    SpanningTree t = sample_tree(g, TreeKind::RST, member);
    auto single = run_batch(linearize(t), train, test);
    CHECK(committee == single);
    // odd committees can't tie: predictions are always +/-1
    RngStream c3(8, 0);
    for (std::int8_t p : committee_predict(g, TreeKind::NWRST, 7, train, test, c3))
        CHECK((p == 1 || p == -1));
}

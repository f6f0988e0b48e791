#pragma once

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <vector>

#include "wta/graph.hpp"
#include "wta/linearize.hpp"
#include "wta/rng.hpp"
#include "wta/samplers.hpp"

namespace wta {

struct TraceStep {
    int node;  // tree node id (line order position is implicit in the run)
    std::int8_t predicted;
    std::int8_t truth;
    bool mistake;
};

struct OnlineTrace {
    std::vector<TraceStep> steps;
    int mistakes = 0;
    long long index_tree_visits = 0;

    void export_csv(std::ostream& out) const {
        out << "step,node,predicted,true,mistake\n";
        for (size_t i = 0; i < steps.size(); ++i)
            out << i << ',' << steps[i].node << ',' << int(steps[i].predicted) << ','
                << int(steps[i].truth) << ',' << int(steps[i].mistake) << '\n';
    }
};

// Online nearest-neighbor state over a line graph. A complete binary tree
// with 2^ceil(log2 n) leaf slots tracks which positions are revealed: an
// internal node is marked iff its subtree holds a revealed real leaf. The
// revealed positions are also chained in a doubly-linked list in line order,
// so after locating one side's neighbor the other is a single list step.
class PredictorState {
  public:
    explicit PredictorState(const LineGraph& line) : line_(&line) {
        n_ = std::max(line.size(), 1);
        leaves_ = 1;
        while (leaves_ < n_) leaves_ <<= 1;
        marked_.assign((2 * leaves_ + 63) / 64, 0);
        nodes_.assign(n_, Node{});
    }

    const LineGraph& line() const { return *line_; }
    int leaf_slots() const { return leaves_; }
    long long visit_counter() const { return visits_; }
    bool is_revealed(int pos) const { return nodes_[pos].revealed != 0; }
    int revealed_count() const { return revealed_count_; }

    // Nearest revealed neighbor's label under resistance distance; +1 before
    // any label is revealed; left neighbor wins exact distance ties.
    std::int8_t predict(int pos) {
        check_pos(pos, "predict");
        if (nodes_[pos].revealed) throw ContractError("predict: node already revealed");
        if (revealed_count_ == 0) return +1;
        auto [left, right] = locate_neighbors(pos, /*count_visits=*/true);
        cached_pos_ = pos;
        cached_left_ = left;
        cached_right_ = right;
        if (left < 0) return nodes_[right].label;
        if (right < 0) return nodes_[left].label;
        long double dl = line_->distance(left, pos);
        long double dr = line_->distance(pos, right);
        return tie_or_left(dl, dr) ? nodes_[left].label : nodes_[right].label;
    }

    // Distances within a tiny relative band count as ties, and ties go to the
    // left neighbor. The band keeps predictions invariant under uniform weight
    // rescaling: equal sums of reciprocals can differ by per-term rounding
    // once every weight is multiplied by the same constant.
    static bool tie_or_left(long double dl, long double dr) {
        long double scale = std::max(dl, dr);
        return dl <= dr + 1e-12L * scale;
    }

    void reveal(int pos, std::int8_t label) {
        check_pos(pos, "reveal");
        if (label != -1 && label != 1) throw ContractError("reveal: label must be +/-1");
        if (nodes_[pos].revealed) throw ContractError("reveal: node already revealed");
        // predict() typically just located this position's neighbors; reuse
        // them unless a reveal has invalidated the cache since
        auto [left, right] = pos == cached_pos_
                                 ? std::pair<int, int>{cached_left_, cached_right_}
                                 : locate_neighbors(pos, /*count_visits=*/false);
        cached_pos_ = -1;
        nodes_[pos].prev = left;
        nodes_[pos].next = right;
        if (left >= 0) nodes_[left].next = pos;
        if (right >= 0) nodes_[right].prev = pos;
        nodes_[pos].label = label;
        nodes_[pos].revealed = 1;
        ++revealed_count_;
        // mark the path up to the first already-marked ancestor
        int node = leaves_ + pos;
        while (node >= 1 && !marked(node)) {
            set_marked(node);
            node >>= 1;
        }
    }

  private:
    void check_pos(int pos, const char* op) const {
        if (pos < 0 || pos >= line_->size())
            throw ContractError(std::string(op) + ": position out of range");
    }

    // Nearest revealed positions strictly left/right of pos (-1 if absent).
    // Ascend to the first marked ancestor, descend into its other child
    // toward pos, then take one step in the revealed list for the far side.
    std::pair<int, int> locate_neighbors(int pos, bool count_visits) {
        if (revealed_count_ == 0) return {-1, -1};
        long long local = 0;
        int node = leaves_ + pos;
        bool from_right = false;
        while (node > 1) {
            from_right = (node & 1) != 0;
            node >>= 1;
            ++local;
            if (marked(node)) break;
        }
        if (!marked(node)) {
            if (count_visits) visits_ += local;
            return {-1, -1};  // unreachable while revealed_count_ > 0, kept for safety
        }
        int left = -1, right = -1;
        if (from_right) {
            // revealed leaves live in the left sibling subtree: rightmost one
            // is the nearest left neighbor
            int d = 2 * node;  // left child
            ++local;
            while (d < leaves_) {
                d = marked(2 * d + 1) ? 2 * d + 1 : 2 * d;
                ++local;
            }
            left = d - leaves_;
            right = nodes_[left].next;
        } else {
            // revealed leaves live in the right sibling subtree: leftmost one
            // is the nearest right neighbor
            int d = 2 * node + 1;  // right child
            ++local;
            while (d < leaves_) {
                d = marked(2 * d) ? 2 * d : 2 * d + 1;
                ++local;
            }
            right = d - leaves_;
            left = nodes_[right].prev;
        }
        if (count_visits) visits_ += local;
        return {left, right};
    }

    const LineGraph* line_;
    int n_ = 0;
    int leaves_ = 0;
    // linked-list fields packed per position so one cache line covers a node
    struct Node {
        int prev = -1;
        int next = -1;
        std::int8_t label = 0;
        std::uint8_t revealed = 0;
    };
    bool marked(int node) const { return (marked_[node >> 6] >> (node & 63)) & 1; }
    void set_marked(int node) { marked_[node >> 6] |= std::uint64_t(1) << (node & 63); }
    // mark bits packed 64 per word so the whole index tree stays cache-resident
    std::vector<std::uint64_t> marked_;
    std::vector<Node> nodes_;
    int revealed_count_ = 0;
    long long visits_ = 0;
    int cached_pos_ = -1;
    int cached_left_ = -1;
    int cached_right_ = -1;
};

// Full online protocol: predict, compare, reveal, for each node in `order`
// (a permutation of line positions given as tree node ids).
inline OnlineTrace run_online(const LineGraph& l, const Labeling& y,
                              const std::vector<int>& order) {
    y.require_known("run_online");
    const int n = l.size();
    if (static_cast<int>(order.size()) != n) throw ContractError("run_online: order size mismatch");
    std::vector<char> seen(n, 0);
    for (int v : order) {
        if (v < 0 || v >= n || seen[v]) throw ContractError("run_online: order is not a permutation");
        seen[v] = 1;
    }
    auto pos_of = l.positions();
    PredictorState state(l);
    OnlineTrace trace;
    trace.steps.reserve(n);
    for (int v : order) {
        int pos = pos_of[v];
        std::int8_t pred = state.predict(pos);
        std::int8_t truth = y.values[v];
        bool mistake = pred != truth;
        trace.steps.push_back({v, pred, truth, mistake});
        if (mistake) ++trace.mistakes;
        state.reveal(pos, truth);
    }
    trace.index_tree_visits = state.visit_counter();
    return trace;
}

// Train/test protocol: reveal all train labels, then predict each test node
// with no feedback between test predictions.
inline std::vector<std::int8_t> run_batch(const LineGraph& l,
                                          const std::vector<std::pair<int, std::int8_t>>& train,
                                          const std::vector<int>& test) {
    auto pos_of = l.positions();
    std::vector<char> in_train(l.size(), 0);
    PredictorState state(l);
    for (auto [v, label] : train) {
        if (v < 0 || v >= l.size()) throw ContractError("run_batch: train node out of range");
        in_train[v] = 1;
        state.reveal(pos_of[v], label);
    }
    std::vector<std::int8_t> predictions;
    predictions.reserve(test.size());
    for (int v : test) {
        if (v < 0 || v >= l.size()) throw ContractError("run_batch: test node out of range");
        if (in_train[v]) throw ContractError("run_batch: train and test overlap");
        predictions.push_back(state.predict(pos_of[v]));
    }
    return predictions;
}

// Majority vote over k independently sampled, linearized, batch-predicted
// trees. k must be odd so votes cannot tie.
inline std::vector<std::int8_t> committee_predict(
    const Graph& g, TreeKind kind, int k,
    const std::vector<std::pair<int, std::int8_t>>& train, const std::vector<int>& test,
    RngStream& rng, bool unit_weight_prediction = false) {
    if (k < 1 || k % 2 == 0) throw ContractError("committee_predict: committee size must be odd");
    std::vector<int> votes(test.size(), 0);
    for (int member = 0; member < k; ++member) {
        RngStream stream = rng.substream(member);
        SpanningTree t = sample_tree(g, kind, stream);
        LineGraph l = linearize(t);
        if (unit_weight_prediction) l = with_unit_weights(l);
        std::vector<std::int8_t> preds = run_batch(l, train, test);
        for (size_t i = 0; i < test.size(); ++i) votes[i] += preds[i];
    }
    std::vector<std::int8_t> out(test.size());
    for (size_t i = 0; i < test.size(); ++i) out[i] = votes[i] > 0 ? +1 : -1;
    return out;
}

}  // namespace wta

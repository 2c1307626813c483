#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <json.hpp>

#include "calib/errors.hpp"
#include "calib/surrogate.hpp"

namespace calib {

namespace {

double gini(std::size_t n_pos, std::size_t n_total) {
    if (n_total == 0) return 0.0;
    const double p = static_cast<double>(n_pos) / static_cast<double>(n_total);
    return 2.0 * p * (1.0 - p);
}

struct Split {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double impurity = 0.0;  // weighted child Gini
};

struct Builder {
    const TrainingSet& data;
    const DecisionTreeHyper& hyper;
    std::vector<DecisionTreeModel::Node> nodes;

    Split best_split(const std::vector<int>& idx) const {
        const std::size_t arity = data.features[0].size();
        Split best;
        std::vector<std::pair<double, Label>> column(idx.size());
        for (std::size_t f = 0; f < arity; ++f) {
            for (std::size_t k = 0; k < idx.size(); ++k) {
                const auto i = static_cast<std::size_t>(idx[k]);
                column[k] = {data.features[i][f], data.labels[i]};
            }
            std::sort(column.begin(), column.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });

            std::size_t total_pos = 0;
            for (const auto& [v, y] : column) {
                if (y == Label::Positive) ++total_pos;
            }
            std::size_t left_n = 0;
            std::size_t left_pos = 0;
            for (std::size_t k = 0; k + 1 < column.size(); ++k) {
                ++left_n;
                if (column[k].second == Label::Positive) ++left_pos;
                if (column[k].first == column[k + 1].first) continue;
                const double threshold =
                    0.5 * (column[k].first + column[k + 1].first);
                const std::size_t right_n = column.size() - left_n;
                const std::size_t right_pos = total_pos - left_pos;
                const double impurity =
                    (static_cast<double>(left_n) * gini(left_pos, left_n) +
                     static_cast<double>(right_n) * gini(right_pos, right_n)) /
                    static_cast<double>(column.size());
                // Strict improvement; ties resolve to the earliest
                // (feature, threshold) in scan order.
                if (!best.found || impurity < best.impurity - 1e-15) {
                    best = Split{true, static_cast<int>(f), threshold, impurity};
                }
            }
        }
        return best;
    }

    int make_leaf(const std::vector<int>& idx) {
        std::size_t n_pos = 0;
        for (int i : idx) {
            if (data.labels[static_cast<std::size_t>(i)] == Label::Positive) ++n_pos;
        }
        DecisionTreeModel::Node leaf;
        const std::size_t n = idx.size();
        // Majority class; exact tie resolves Negative.
        leaf.cls = 2 * n_pos > n ? Label::Positive : Label::Negative;
        const std::size_t n_cls = leaf.cls == Label::Positive ? n_pos : n - n_pos;
        leaf.prob = n == 0 ? 0.0 : static_cast<double>(n_cls) / static_cast<double>(n);
        nodes.push_back(leaf);
        return static_cast<int>(nodes.size() - 1);
    }

    int build(const std::vector<int>& idx, int depth) {
        std::size_t n_pos = 0;
        for (int i : idx) {
            if (data.labels[static_cast<std::size_t>(i)] == Label::Positive) ++n_pos;
        }
        const bool pure = n_pos == 0 || n_pos == idx.size();
        if (pure || depth >= hyper.max_depth ||
            idx.size() < static_cast<std::size_t>(hyper.min_samples_split)) {
            return make_leaf(idx);
        }
        // No zero-gain early stop: an impurity tie can still enable pure
        // grandchildren (XOR-style concepts), so recurse while any split exists.
        const Split split = best_split(idx);
        if (!split.found) return make_leaf(idx);

        std::vector<int> left_idx;
        std::vector<int> right_idx;
        for (int i : idx) {
            const double v =
                data.features[static_cast<std::size_t>(i)]
                             [static_cast<std::size_t>(split.feature)];
            (v <= split.threshold ? left_idx : right_idx).push_back(i);
        }
        if (left_idx.empty() || right_idx.empty()) return make_leaf(idx);

        DecisionTreeModel::Node node;
        node.feature = split.feature;
        node.threshold = split.threshold;
        nodes.push_back(node);
        const int self = static_cast<int>(nodes.size() - 1);
        nodes[static_cast<std::size_t>(self)].left = build(left_idx, depth + 1);
        nodes[static_cast<std::size_t>(self)].right = build(right_idx, depth + 1);
        return self;
    }
};

}  // namespace

DecisionTreeModel train_decision_tree(const TrainingSet& train,
                                      const DecisionTreeHyper& hyper) {
    if (train.size() == 0) throw TooFewRowsError("empty training set");
    Builder builder{train, hyper, {}};
    std::vector<int> idx(train.size());
    std::iota(idx.begin(), idx.end(), 0);
    builder.build(idx, 0);
    return DecisionTreeModel(std::move(builder.nodes), hyper);
}

Label DecisionTreeModel::predict(const ParameterVector& x) const {
    int cur = 0;
    while (nodes_[static_cast<std::size_t>(cur)].feature >= 0) {
        const Node& node = nodes_[static_cast<std::size_t>(cur)];
        if (static_cast<std::size_t>(node.feature) >= x.size()) {
            throw ArityMismatchError("input arity below tree feature index");
        }
        cur = x[static_cast<std::size_t>(node.feature)] <= node.threshold
                  ? node.left
                  : node.right;
    }
    return nodes_[static_cast<std::size_t>(cur)].cls;
}

std::string DecisionTreeModel::serialize() const {
    nlohmann::json j;
    j["kind"] = kind();
    j["hyper"] = {{"max_depth", hyper_.max_depth},
                  {"min_samples_split", hyper_.min_samples_split}};
    auto& arr = j["nodes"] = nlohmann::json::array();
    for (const Node& n : nodes_) {
        arr.push_back({{"feature", n.feature},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right},
                       {"class", n.cls == Label::Positive ? "positive" : "negative"},
                       {"prob", n.prob}});
    }
    return j.dump();
}

}  // namespace calib

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <json.hpp>

#include "calib/errors.hpp"
#include "calib/surrogate.hpp"

namespace calib {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Second-order gain of a candidate split, lambda-regularised.
double leaf_score(double g, double h, double lambda) {
    return g * g / (h + lambda);
}

struct TreeBuilder {
    const TrainingSet& data;
    const std::vector<double>& grad;
    const std::vector<double>& hess;
    const GbtHyper& hyper;
    GradientBoostedModel::Tree tree;

    struct Split {
        bool found = false;
        int feature = -1;
        double threshold = 0.0;
        double gain = 0.0;
    };

    Split best_split(const std::vector<int>& idx) const {
        double g_total = 0.0;
        double h_total = 0.0;
        for (int i : idx) {
            g_total += grad[static_cast<std::size_t>(i)];
            h_total += hess[static_cast<std::size_t>(i)];
        }
        const double parent = leaf_score(g_total, h_total, hyper.lambda_l2);
        const std::size_t arity = data.features[0].size();

        Split best;
        std::vector<int> order(idx);
        for (std::size_t f = 0; f < arity; ++f) {
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                return data.features[static_cast<std::size_t>(a)][f] <
                       data.features[static_cast<std::size_t>(b)][f];
            });
            double g_left = 0.0;
            double h_left = 0.0;
            for (std::size_t k = 0; k + 1 < order.size(); ++k) {
                const auto i = static_cast<std::size_t>(order[k]);
                g_left += grad[i];
                h_left += hess[i];
                const double v = data.features[i][f];
                const double v_next =
                    data.features[static_cast<std::size_t>(order[k + 1])][f];
                if (v == v_next) continue;
                const double gain =
                    0.5 * (leaf_score(g_left, h_left, hyper.lambda_l2) +
                           leaf_score(g_total - g_left, h_total - h_left,
                                      hyper.lambda_l2) -
                           parent);
                if (!best.found || gain > best.gain + 1e-15) {
                    best = Split{true, static_cast<int>(f), 0.5 * (v + v_next), gain};
                }
            }
        }
        return best;
    }

    int build(const std::vector<int>& idx, int depth) {
        GradientBoostedModel::TreeNode node;
        if (depth < hyper.max_depth && idx.size() >= 2) {
            const Split split = best_split(idx);
            if (split.found && split.gain > 1e-12) {
                node.feature = split.feature;
                node.threshold = split.threshold;
                tree.push_back(node);
                const int self = static_cast<int>(tree.size() - 1);
                std::vector<int> left_idx;
                std::vector<int> right_idx;
                for (int i : idx) {
                    const double v =
                        data.features[static_cast<std::size_t>(i)]
                                     [static_cast<std::size_t>(split.feature)];
                    (v <= split.threshold ? left_idx : right_idx).push_back(i);
                }
                tree[static_cast<std::size_t>(self)].left = build(left_idx, depth + 1);
                tree[static_cast<std::size_t>(self)].right = build(right_idx, depth + 1);
                return self;
            }
        }
        // Leaf: weight = -sum(g) / (sum(h) + lambda)
        double g = 0.0;
        double h = 0.0;
        for (int i : idx) {
            g += grad[static_cast<std::size_t>(i)];
            h += hess[static_cast<std::size_t>(i)];
        }
        node.weight = -g / (h + hyper.lambda_l2);
        tree.push_back(node);
        return static_cast<int>(tree.size() - 1);
    }
};

double tree_output(const GradientBoostedModel::Tree& tree, const ParameterVector& x) {
    int cur = 0;
    while (tree[static_cast<std::size_t>(cur)].feature >= 0) {
        const auto& node = tree[static_cast<std::size_t>(cur)];
        if (static_cast<std::size_t>(node.feature) >= x.size()) {
            throw ArityMismatchError("input arity below tree feature index");
        }
        cur = x[static_cast<std::size_t>(node.feature)] <= node.threshold
                  ? node.left
                  : node.right;
    }
    return tree[static_cast<std::size_t>(cur)].weight;
}

}  // namespace

GradientBoostedModel train_gbt(const TrainingSet& train, const GbtHyper& hyper) {
    const std::size_t n = train.size();
    std::size_t n_pos = 0;
    for (Label y : train.labels) {
        if (y == Label::Positive) ++n_pos;
    }
    if (n_pos == 0 || n_pos == n) {
        throw SingleClassError("gradient boosting needs both classes present");
    }

    const double prior = static_cast<double>(n_pos) / static_cast<double>(n);
    const double base_score = std::log(prior / (1.0 - prior));

    std::vector<double> margin(n, base_score);
    std::vector<double> grad(n);
    std::vector<double> hess(n);
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);

    std::vector<GradientBoostedModel::Tree> trees;
    std::vector<double> loss_trace;
    trees.reserve(static_cast<std::size_t>(hyper.n_rounds));

    for (int round = 0; round < hyper.n_rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(margin[i]);
            const double y = train.labels[i] == Label::Positive ? 1.0 : 0.0;
            grad[i] = p - y;
            hess[i] = p * (1.0 - p);
        }
        TreeBuilder builder{train, grad, hess, hyper, {}};
        builder.build(all, 0);
        trees.push_back(std::move(builder.tree));

        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            margin[i] += hyper.learning_rate * tree_output(trees.back(), train.features[i]);
            const double p = sigmoid(margin[i]);
            const double y = train.labels[i] == Label::Positive ? 1.0 : 0.0;
            const double eps = 1e-15;
            loss -= y * std::log(std::max(p, eps)) +
                    (1.0 - y) * std::log(std::max(1.0 - p, eps));
        }
        loss_trace.push_back(loss / static_cast<double>(n));
    }

    GradientBoostedModel model(std::move(trees), hyper, base_score);
    model.training_loss_trace = std::move(loss_trace);
    return model;
}

double GradientBoostedModel::predict_probability(const ParameterVector& x) const {
    double margin = base_score_;
    for (const Tree& tree : trees_) {
        margin += hyper_.learning_rate * tree_output(tree, x);
    }
    return sigmoid(margin);
}

Label GradientBoostedModel::predict(const ParameterVector& x) const {
    return predict_probability(x) > 0.5 ? Label::Positive : Label::Negative;
}

std::string GradientBoostedModel::serialize() const {
    nlohmann::json j;
    j["kind"] = kind();
    j["hyper"] = {{"n_rounds", hyper_.n_rounds},
                  {"learning_rate", hyper_.learning_rate},
                  {"max_depth", hyper_.max_depth},
                  {"lambda_l2", hyper_.lambda_l2}};
    j["base_score"] = base_score_;
    auto& forest = j["trees"] = nlohmann::json::array();
    for (const Tree& tree : trees_) {
        nlohmann::json t = nlohmann::json::array();
        for (const TreeNode& n : tree) {
            t.push_back({{"feature", n.feature},
                         {"threshold", n.threshold},
                         {"left", n.left},
                         {"right", n.right},
                         {"weight", n.weight}});
        }
        forest.push_back(std::move(t));
    }
    return j.dump();
}

}  // namespace calib

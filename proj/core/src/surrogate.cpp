#include "calib/surrogate.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include <json.hpp>

#include "calib/errors.hpp"
#include "calib/rng.hpp"

namespace calib {

namespace {

Label label_from_string(const std::string& s) {
    if (s == "positive") return Label::Positive;
    if (s == "negative") return Label::Negative;
    throw ConfigError("unknown label: " + s);
}

}  // namespace

std::unique_ptr<SurrogateClassifier> deserialize_model(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad model document: ") + e.what());
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "decision_tree") {
        DecisionTreeHyper hyper{j.at("hyper").at("max_depth").get<int>(),
                                j.at("hyper").at("min_samples_split").get<int>()};
        std::vector<DecisionTreeModel::Node> nodes;
        for (const auto& n : j.at("nodes")) {
            DecisionTreeModel::Node node;
            node.feature = n.at("feature").get<int>();
            node.threshold = n.at("threshold").get<double>();
            node.left = n.at("left").get<int>();
            node.right = n.at("right").get<int>();
            node.cls = label_from_string(n.at("class").get<std::string>());
            node.prob = n.at("prob").get<double>();
            nodes.push_back(node);
        }
        return std::make_unique<DecisionTreeModel>(std::move(nodes), hyper);
    }
    if (kind == "gradient_boosted") {
        GbtHyper hyper{j.at("hyper").at("n_rounds").get<int>(),
                       j.at("hyper").at("learning_rate").get<double>(),
                       j.at("hyper").at("max_depth").get<int>(),
                       j.at("hyper").at("lambda_l2").get<double>()};
        std::vector<GradientBoostedModel::Tree> trees;
        for (const auto& t : j.at("trees")) {
            GradientBoostedModel::Tree tree;
            for (const auto& n : t) {
                GradientBoostedModel::TreeNode node;
                node.feature = n.at("feature").get<int>();
                node.threshold = n.at("threshold").get<double>();
                node.left = n.at("left").get<int>();
                node.right = n.at("right").get<int>();
                node.weight = n.at("weight").get<double>();
                tree.push_back(node);
            }
            trees.push_back(std::move(tree));
        }
        return std::make_unique<GradientBoostedModel>(
            std::move(trees), hyper, j.at("base_score").get<double>());
    }
    if (kind == "linear_svm") {
        SvmHyper hyper{j.at("hyper").at("lambda_reg").get<double>(),
                       j.at("hyper").at("epochs").get<int>()};
        std::vector<std::pair<double, double>> ranges;
        for (const auto& r : j.at("feature_ranges")) {
            ranges.emplace_back(r.at(0).get<double>(), r.at(1).get<double>());
        }
        return std::make_unique<LinearSvmModel>(
            j.at("weights").get<std::vector<double>>(), j.at("bias").get<double>(),
            hyper, std::move(ranges));
    }
    throw ConfigError("unknown model kind: " + kind);
}

std::pair<TrainingSet, TrainingSet> split_train_validation(const TrainingSet& db,
                                                           double ratio,
                                                           std::uint64_t seed) {
    if (db.size() < 5) throw TooFewRowsError("need at least 5 rows to split");
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw TooFewRowsError("split ratio must lie in (0,1)");
    }

    std::vector<std::size_t> pos_idx;
    std::vector<std::size_t> neg_idx;
    for (std::size_t i = 0; i < db.size(); ++i) {
        (db.labels[i] == Label::Positive ? pos_idx : neg_idx).push_back(i);
    }

    rng::UniformSource source(rng::hash2(seed, 0x5b117ULL));
    auto shuffle = [&](std::vector<std::size_t>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[source.next_index(i)]);
        }
    };

    TrainingSet train;
    TrainingSet val;
    auto assign = [&](const std::vector<std::size_t>& order, std::size_t n_train) {
        for (std::size_t k = 0; k < order.size(); ++k) {
            auto& dst = k < n_train ? train : val;
            dst.add(db.features[order[k]], db.labels[order[k]]);
        }
    };

    if (pos_idx.size() >= 2 && neg_idx.size() >= 2) {
        // Stratified: split each class separately, always holding out at
        // least one row per class.
        shuffle(pos_idx);
        shuffle(neg_idx);
        for (auto* cls : {&pos_idx, &neg_idx}) {
            std::size_t n_train = static_cast<std::size_t>(
                std::llround(ratio * static_cast<double>(cls->size())));
            n_train = std::clamp<std::size_t>(n_train, 1, cls->size() - 1);
            assign(*cls, n_train);
        }
    } else {
        std::vector<std::size_t> all(db.size());
        std::iota(all.begin(), all.end(), 0);
        shuffle(all);
        std::size_t n_train = static_cast<std::size_t>(
            std::llround(ratio * static_cast<double>(all.size())));
        n_train = std::clamp<std::size_t>(n_train, 1, all.size() - 1);
        assign(all, n_train);
    }
    return {std::move(train), std::move(val)};
}

ValidationReport f1_score(const std::vector<Label>& predictions,
                          const std::vector<Label>& truth) {
    if (predictions.size() != truth.size()) {
        throw LengthMismatchError("prediction/truth lengths differ");
    }
    if (predictions.empty()) throw LengthMismatchError("empty prediction set");

    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const bool pred_pos = predictions[i] == Label::Positive;
        const bool true_pos = truth[i] == Label::Positive;
        if (pred_pos && true_pos) ++tp;
        if (pred_pos && !true_pos) ++fp;
        if (!pred_pos && true_pos) ++fn;
    }

    ValidationReport report;
    report.n_val = predictions.size();
    report.precision =
        tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    report.recall =
        tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    const double pr = report.precision + report.recall;
    report.f1 = pr == 0.0 ? 0.0 : 2.0 * report.precision * report.recall / pr;
    return report;
}

ValidationReport validate_model(const SurrogateClassifier& model,
                                const TrainingSet& validation) {
    std::vector<Label> predictions;
    predictions.reserve(validation.size());
    for (const ParameterVector& x : validation.features) {
        predictions.push_back(model.predict(x));
    }
    return f1_score(predictions, validation.labels);
}

bool is_confident(const ValidationReport& report, std::size_t db_size,
                  std::size_t batch_size, std::size_t n_params,
                  double f1_threshold) {
    return db_size >= batch_size * n_params && report.f1 >= f1_threshold;
}

}  // namespace calib

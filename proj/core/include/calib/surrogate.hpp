#ifndef CALIB_SURROGATE_HPP
#define CALIB_SURROGATE_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "calib/abm.hpp"
#include "calib/ks.hpp"

namespace calib {

struct TrainingSet {
    std::vector<ParameterVector> features;
    std::vector<Label> labels;

    std::size_t size() const { return labels.size(); }
    void add(ParameterVector x, Label y) {
        features.push_back(std::move(x));
        labels.push_back(y);
    }
};

struct ValidationReport {
    double f1 = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    std::size_t n_train = 0;
    std::size_t n_val = 0;
};

// Trained binary classifier over parameter vectors. Immutable once built;
// safe to share across threads for prediction.
class SurrogateClassifier {
public:
    virtual ~SurrogateClassifier() = default;
    virtual Label predict(const ParameterVector& x) const = 0;
    virtual std::string kind() const = 0;
    // Self-describing JSON; deserialize_model restores predictions bitwise.
    virtual std::string serialize() const = 0;
};

std::unique_ptr<SurrogateClassifier> deserialize_model(const std::string& text);

// ---------------------------------------------------------------------------
// Decision tree (CART, Gini impurity)

struct DecisionTreeHyper {
    int max_depth = 10;
    int min_samples_split = 2;
};

class DecisionTreeModel final : public SurrogateClassifier {
public:
    struct Node {
        int feature = -1;       // -1 for leaves
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        Label cls = Label::Negative;
        double prob = 0.0;      // training fraction of the leaf class
    };

    DecisionTreeModel(std::vector<Node> nodes, DecisionTreeHyper hyper)
        : nodes_(std::move(nodes)), hyper_(hyper) {}

    Label predict(const ParameterVector& x) const override;
    std::string kind() const override { return "decision_tree"; }
    std::string serialize() const override;

    const std::vector<Node>& nodes() const { return nodes_; }
    const DecisionTreeHyper& hyper() const { return hyper_; }

private:
    std::vector<Node> nodes_;
    DecisionTreeHyper hyper_;
};

DecisionTreeModel train_decision_tree(const TrainingSet& train,
                                      const DecisionTreeHyper& hyper);

// ---------------------------------------------------------------------------
// Gradient-boosted trees (second-order boosting on logistic loss)

struct GbtHyper {
    int n_rounds = 100;
    double learning_rate = 0.1;
    int max_depth = 3;
    double lambda_l2 = 1.0;
};

class GradientBoostedModel final : public SurrogateClassifier {
public:
    struct TreeNode {
        int feature = -1;
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        double weight = 0.0;  // leaf output in log-odds space
    };
    using Tree = std::vector<TreeNode>;

    GradientBoostedModel(std::vector<Tree> trees, GbtHyper hyper, double base_score)
        : trees_(std::move(trees)), hyper_(hyper), base_score_(base_score) {}

    // Probability of the Positive class.
    double predict_probability(const ParameterVector& x) const;
    // p > 0.5 is Positive; a tie at exactly 0.5 resolves Negative.
    Label predict(const ParameterVector& x) const override;
    std::string kind() const override { return "gradient_boosted"; }
    std::string serialize() const override;

    const std::vector<Tree>& trees() const { return trees_; }
    double base_score() const { return base_score_; }
    const GbtHyper& hyper() const { return hyper_; }

    // Per-round training log-loss recorded during fitting (n_rounds entries).
    std::vector<double> training_loss_trace;

private:
    std::vector<Tree> trees_;
    GbtHyper hyper_;
    double base_score_;
};

GradientBoostedModel train_gbt(const TrainingSet& train, const GbtHyper& hyper);

// ---------------------------------------------------------------------------
// Linear SVM (Pegasos stochastic subgradient on the primal hinge loss)

struct SvmHyper {
    double lambda_reg = 1e-3;
    int epochs = 50;
};

class LinearSvmModel final : public SurrogateClassifier {
public:
    LinearSvmModel(std::vector<double> weights, double bias, SvmHyper hyper,
                   std::vector<std::pair<double, double>> feature_ranges)
        : weights_(std::move(weights)), bias_(bias), hyper_(hyper),
          feature_ranges_(std::move(feature_ranges)) {}

    Label predict(const ParameterVector& x) const override;
    std::string kind() const override { return "linear_svm"; }
    std::string serialize() const override;

    const std::vector<double>& weights() const { return weights_; }
    double bias() const { return bias_; }
    const SvmHyper& hyper() const { return hyper_; }

private:
    std::vector<double> weights_;
    double bias_;
    SvmHyper hyper_;
    // (low, high) per feature; inputs are mapped to [0,1] before the dot
    // product, matching the scaling used in training.
    std::vector<std::pair<double, double>> feature_ranges_;
};

LinearSvmModel train_svm(const TrainingSet& train, const SvmHyper& hyper,
                         const std::vector<std::pair<double, double>>& feature_ranges,
                         std::uint64_t seed);

// ---------------------------------------------------------------------------
// Shared machinery

// Seeded shuffle-and-split, stratified by label when both classes have at
// least two members. Returns (train, validation).
std::pair<TrainingSet, TrainingSet> split_train_validation(const TrainingSet& db,
                                                           double ratio,
                                                           std::uint64_t seed);

// F1 on the Positive class; P + R = 0 yields f1 = 0. n_train is left 0.
ValidationReport f1_score(const std::vector<Label>& predictions,
                          const std::vector<Label>& truth);

ValidationReport validate_model(const SurrogateClassifier& model,
                                const TrainingSet& validation);

// Confidence gate: enough labelled vectors and a strong enough F1.
bool is_confident(const ValidationReport& report, std::size_t db_size,
                  std::size_t batch_size, std::size_t n_params,
                  double f1_threshold);

}  // namespace calib

#endif

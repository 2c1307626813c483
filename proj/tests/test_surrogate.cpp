#include <doctest.h>

#include <cmath>

#include "calib/errors.hpp"
#include "calib/rng.hpp"
#include "calib/surrogate.hpp"

using namespace calib;

namespace {

TrainingSet separable_1d() {
    TrainingSet set;
    for (int i = 0; i < 10; ++i) {
        const double x = 0.05 + 0.04 * i;  // < 0.5
        set.add({x}, Label::Negative);
    }
    for (int i = 0; i < 10; ++i) {
        const double x = 0.55 + 0.04 * i;  // > 0.5
        set.add({x}, Label::Positive);
    }
    return set;
}

TrainingSet xor_2d() {
    TrainingSet set;
    set.add({0.1, 0.1}, Label::Negative);
    set.add({0.9, 0.9}, Label::Negative);
    set.add({0.1, 0.9}, Label::Positive);
    set.add({0.9, 0.1}, Label::Positive);
    return set;
}

TrainingSet random_set(std::size_t n, std::size_t arity, std::uint64_t seed) {
    rng::UniformSource source(seed);
    TrainingSet set;
    for (std::size_t i = 0; i < n; ++i) {
        ParameterVector x(arity);
        for (double& v : x) v = source.next_unit();
        // noisy linear concept
        const bool pos = x[0] + 0.3 * x[arity - 1] + 0.2 * source.next_unit() > 0.6;
        set.add(std::move(x), pos ? Label::Positive : Label::Negative);
    }
    return set;
}

double training_accuracy(const SurrogateClassifier& model, const TrainingSet& set) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (model.predict(set.features[i]) == set.labels[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(set.size());
}

std::vector<std::pair<double, double>> unit_ranges(std::size_t arity) {
    return std::vector<std::pair<double, double>>(arity, {0.0, 1.0});
}

}  // namespace

TEST_CASE("decision tree separates a 1-feature threshold concept") {
    const DecisionTreeModel model = train_decision_tree(separable_1d(), {});
    CHECK(training_accuracy(model, separable_1d()) == 1.0);
    // single split suffices: root plus two leaves
    CHECK(model.nodes().size() == 3);
}

TEST_CASE("decision tree on one class is a single leaf") {
    TrainingSet set;
    set.add({0.2, 0.4}, Label::Positive);
    set.add({0.6, 0.8}, Label::Positive);
    const DecisionTreeModel model = train_decision_tree(set, {});
    CHECK(model.nodes().size() == 1);
    CHECK(model.predict({0.0, 0.0}) == Label::Positive);
    CHECK(model.predict({123.0, -5.0}) == Label::Positive);
}

TEST_CASE("decision tree solves XOR at depth 2") {
    const DecisionTreeModel model = train_decision_tree(xor_2d(), {.max_depth = 2});
    CHECK(training_accuracy(model, xor_2d()) == 1.0);
}

TEST_CASE("decision tree resubstitution accuracy is 1.0 on conflict-free data") {
    const TrainingSet set = random_set(200, 3, 99);
    const DecisionTreeModel model =
        train_decision_tree(set, {.max_depth = 64, .min_samples_split = 2});
    CHECK(training_accuracy(model, set) == 1.0);
}

TEST_CASE("gbt training loss is non-increasing and fits separable data") {
    const TrainingSet set = separable_1d();
    const GradientBoostedModel model = train_gbt(set, {.n_rounds = 20});
    REQUIRE(model.training_loss_trace.size() == 20);
    for (std::size_t r = 1; r < model.training_loss_trace.size(); ++r) {
        CHECK(model.training_loss_trace[r] <=
              model.training_loss_trace[r - 1] + 1e-12);
    }
    CHECK(training_accuracy(model, set) == 1.0);
}

TEST_CASE("gbt with zero rounds predicts the prior") {
    TrainingSet set;
    set.add({0.1}, Label::Positive);
    set.add({0.2}, Label::Positive);
    set.add({0.3}, Label::Positive);
    set.add({0.9}, Label::Negative);
    const GradientBoostedModel model = train_gbt(set, {.n_rounds = 0});
    CHECK(model.predict_probability({0.5}) == doctest::Approx(0.75));
    CHECK(model.predict({0.5}) == Label::Positive);
}

TEST_CASE("gbt probability tie at 0.5 resolves Negative") {
    TrainingSet set;
    set.add({0.1}, Label::Positive);
    set.add({0.9}, Label::Negative);
    const GradientBoostedModel model = train_gbt(set, {.n_rounds = 0});
    CHECK(model.predict_probability({0.5}) == doctest::Approx(0.5));
    CHECK(model.predict({0.5}) == Label::Negative);
}

TEST_CASE("gbt huge regularisation keeps predictions at the prior") {
    const TrainingSet set = separable_1d();
    const GradientBoostedModel model =
        train_gbt(set, {.n_rounds = 5, .lambda_l2 = 1e12});
    CHECK(model.predict_probability({0.1}) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("gbt single-leaf weight matches the closed form") {
    // depth 0 forces a single leaf in the first round
    const TrainingSet set = random_set(50, 2, 5);
    const double lambda = 1.0;
    const GradientBoostedModel model =
        train_gbt(set, {.n_rounds = 1, .max_depth = 0, .lambda_l2 = lambda});
    REQUIRE(model.trees().size() == 1);
    REQUIRE(model.trees()[0].size() == 1);

    // independent fold over the data at the base margin
    std::size_t n_pos = 0;
    for (Label y : set.labels) {
        if (y == Label::Positive) ++n_pos;
    }
    const double prior = static_cast<double>(n_pos) / static_cast<double>(set.size());
    const double p = 1.0 / (1.0 + std::exp(-std::log(prior / (1.0 - prior))));
    double g = 0.0;
    double h = 0.0;
    for (Label y : set.labels) {
        g += p - (y == Label::Positive ? 1.0 : 0.0);
        h += p * (1.0 - p);
    }
    CHECK(model.trees()[0][0].weight == doctest::Approx(-g / (h + lambda)).epsilon(1e-10));
}

TEST_CASE("gbt rejects single-class input") {
    TrainingSet set;
    set.add({0.1}, Label::Positive);
    set.add({0.2}, Label::Positive);
    CHECK_THROWS_AS(train_gbt(set, {}), SingleClassError);
}

TEST_CASE("svm fits a separable margin set") {
    TrainingSet set;
    for (int i = 0; i < 20; ++i) {
        set.add({0.1 + 0.01 * i, 0.5}, Label::Negative);
        set.add({0.8 + 0.01 * i, 0.5}, Label::Positive);
    }
    const LinearSvmModel model = train_svm(set, {.epochs = 200}, unit_ranges(2), 3);
    CHECK(training_accuracy(model, set) == 1.0);
}

TEST_CASE("svm decision boundary sits at the centre of mirrored data") {
    // Labels are symmetric under reflection about 0.5, so after the [0,1]
    // feature scaling the separating hyperplane passes through the midpoint:
    // w * 0.5 + b ~ 0.
    TrainingSet set;
    for (int i = 0; i < 50; ++i) {
        const double d = 0.3 + 0.004 * i;
        set.add({0.5 + d}, Label::Positive);
        set.add({0.5 - d}, Label::Negative);
    }
    const LinearSvmModel model = train_svm(set, {.epochs = 200}, unit_ranges(1), 5);
    const double at_centre = model.weights()[0] * 0.5 + model.bias();
    const double scale = std::max(1.0, std::fabs(model.weights()[0]));
    CHECK(std::fabs(at_centre) / scale < 0.1);
}

TEST_CASE("svm survives fully overlapping classes") {
    TrainingSet set;
    for (int i = 0; i < 10; ++i) {
        set.add({0.5, 0.5}, Label::Positive);
        set.add({0.5, 0.5}, Label::Negative);
    }
    const LinearSvmModel model = train_svm(set, {}, unit_ranges(2), 7);
    CHECK(training_accuracy(model, set) == 0.5);
}

TEST_CASE("svm final objective does not exceed the zero-weight objective") {
    const TrainingSet set = random_set(100, 4, 11);
    const SvmHyper hyper{.lambda_reg = 1e-3, .epochs = 50};
    const LinearSvmModel model = train_svm(set, hyper, unit_ranges(4), 13);

    auto objective = [&](const std::vector<double>& w, double b) {
        double hinge = 0.0;
        for (std::size_t i = 0; i < set.size(); ++i) {
            double margin = b;
            for (std::size_t f = 0; f < w.size(); ++f) {
                margin += w[f] * set.features[i][f];
            }
            const double y = set.labels[i] == Label::Positive ? 1.0 : -1.0;
            hinge += std::max(0.0, 1.0 - y * margin);
        }
        hinge /= static_cast<double>(set.size());
        double norm2 = 0.0;
        for (double v : w) norm2 += v * v;
        return hinge + 0.5 * hyper.lambda_reg * norm2;
    };
    CHECK(objective(model.weights(), model.bias()) <=
          objective(std::vector<double>(4, 0.0), 0.0));
}

TEST_CASE("split_train_validation") {
    TrainingSet db;
    for (int i = 0; i < 50; ++i) db.add({0.1 * i}, Label::Positive);
    for (int i = 0; i < 50; ++i) db.add({0.1 * i + 5.0}, Label::Negative);

    const auto [train, val] = split_train_validation(db, 0.8, 1);
    CHECK(train.size() == 80);
    CHECK(val.size() == 20);

    // stratified: both classes present on both sides
    auto has_both = [](const TrainingSet& s) {
        bool pos = false;
        bool neg = false;
        for (Label y : s.labels) (y == Label::Positive ? pos : neg) = true;
        return pos && neg;
    };
    CHECK(has_both(train));
    CHECK(has_both(val));

    TrainingSet skewed;
    for (int i = 0; i < 8; ++i) skewed.add({1.0 * i}, Label::Negative);
    skewed.add({100.0}, Label::Positive);
    skewed.add({101.0}, Label::Positive);
    const auto [t2, v2] = split_train_validation(skewed, 0.8, 2);
    CHECK(has_both(t2));
    CHECK(has_both(v2));

    TrainingSet tiny;
    tiny.add({1.0}, Label::Positive);
    CHECK_THROWS_AS(split_train_validation(tiny, 0.8, 1), TooFewRowsError);
    CHECK_THROWS_AS(split_train_validation(db, 0.0, 1), TooFewRowsError);
}

TEST_CASE("f1 arithmetic") {
    using L = Label;
    const std::vector<L> truth{L::Positive, L::Positive, L::Negative, L::Negative};

    CHECK(f1_score(truth, truth).f1 == 1.0);

    // TP=1, FP=1, FN=1 -> P = R = 0.5 -> f1 = 0.5
    const std::vector<L> mixed{L::Positive, L::Negative, L::Positive, L::Negative};
    const ValidationReport r = f1_score(mixed, truth);
    CHECK(r.precision == 0.5);
    CHECK(r.recall == 0.5);
    CHECK(r.f1 == 0.5);

    const std::vector<L> none{L::Negative, L::Negative, L::Negative, L::Negative};
    CHECK(f1_score(none, truth).f1 == 0.0);

    CHECK_THROWS_AS(f1_score({L::Positive}, truth), LengthMismatchError);
}

TEST_CASE("confidence gate") {
    ValidationReport report;
    report.f1 = 0.95;
    CHECK(is_confident(report, 350, 50, 7, 0.9));
    CHECK_FALSE(is_confident(report, 349, 50, 7, 0.9));
    report.f1 = 0.89;
    CHECK_FALSE(is_confident(report, 400, 50, 7, 0.9));
}

TEST_CASE("model serialization preserves predictions") {
    const TrainingSet set = random_set(150, 3, 21);
    const TrainingSet probes = random_set(200, 3, 22);

    const DecisionTreeModel dt = train_decision_tree(set, {});
    const GradientBoostedModel gbt = train_gbt(set, {.n_rounds = 30});
    const LinearSvmModel svm = train_svm(set, {}, unit_ranges(3), 1);

    for (const SurrogateClassifier* model :
         {static_cast<const SurrogateClassifier*>(&dt),
          static_cast<const SurrogateClassifier*>(&gbt),
          static_cast<const SurrogateClassifier*>(&svm)}) {
        const auto restored = deserialize_model(model->serialize());
        CHECK(restored->kind() == model->kind());
        for (const ParameterVector& x : probes.features) {
            CHECK(restored->predict(x) == model->predict(x));
        }
    }
    CHECK_THROWS_AS(deserialize_model("{\"kind\":\"mystery\"}"), ConfigError);
}

TEST_CASE("training is deterministic") {
    const TrainingSet set = random_set(100, 3, 33);
    CHECK(train_decision_tree(set, {}).serialize() ==
          train_decision_tree(set, {}).serialize());
    CHECK(train_gbt(set, {.n_rounds = 10}).serialize() ==
          train_gbt(set, {.n_rounds = 10}).serialize());
    CHECK(train_svm(set, {}, unit_ranges(3), 9).serialize() ==
          train_svm(set, {}, unit_ranges(3), 9).serialize());
}

#include <cmath>
#include <vector>

#include <json.hpp>

#include "calib/errors.hpp"
#include "calib/rng.hpp"
#include "calib/surrogate.hpp"

namespace calib {

namespace {

std::vector<double> to_unit_features(
    const ParameterVector& x,
    const std::vector<std::pair<double, double>>& ranges) {
    if (x.size() != ranges.size()) {
        throw ArityMismatchError("feature arity does not match svm ranges");
    }
    std::vector<double> u(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto [low, high] = ranges[i];
        u[i] = (x[i] - low) / (high - low);
    }
    return u;
}

}  // namespace

LinearSvmModel train_svm(const TrainingSet& train, const SvmHyper& hyper,
                         const std::vector<std::pair<double, double>>& feature_ranges,
                         std::uint64_t seed) {
    const std::size_t n = train.size();
    std::size_t n_pos = 0;
    for (Label y : train.labels) {
        if (y == Label::Positive) ++n_pos;
    }
    if (n_pos == 0 || n_pos == n) {
        throw SingleClassError("svm training needs both classes present");
    }

    std::vector<std::vector<double>> scaled(n);
    std::vector<double> target(n);
    for (std::size_t i = 0; i < n; ++i) {
        scaled[i] = to_unit_features(train.features[i], feature_ranges);
        target[i] = train.labels[i] == Label::Positive ? 1.0 : -1.0;
    }

    const std::size_t arity = feature_ranges.size();
    std::vector<double> w(arity, 0.0);
    double b = 0.0;

    rng::UniformSource source(rng::hash2(seed, 0x53564dULL));
    const std::size_t iterations = static_cast<std::size_t>(hyper.epochs) * n;
    for (std::size_t t = 1; t <= iterations; ++t) {
        const std::size_t i = source.next_index(n);
        const double eta = 1.0 / (hyper.lambda_reg * static_cast<double>(t));
        double margin = b;
        for (std::size_t f = 0; f < arity; ++f) margin += w[f] * scaled[i][f];
        const double shrink = 1.0 - eta * hyper.lambda_reg;
        if (target[i] * margin < 1.0) {
            for (std::size_t f = 0; f < arity; ++f) {
                w[f] = shrink * w[f] + eta * target[i] * scaled[i][f];
            }
            b += eta * target[i];
        } else {
            for (std::size_t f = 0; f < arity; ++f) w[f] = shrink * w[f];
        }
    }

    return LinearSvmModel(std::move(w), b, hyper, feature_ranges);
}

Label LinearSvmModel::predict(const ParameterVector& x) const {
    const std::vector<double> u = to_unit_features(x, feature_ranges_);
    double margin = bias_;
    for (std::size_t f = 0; f < u.size(); ++f) margin += weights_[f] * u[f];
    return margin > 0.0 ? Label::Positive : Label::Negative;
}

std::string LinearSvmModel::serialize() const {
    nlohmann::json j;
    j["kind"] = kind();
    j["hyper"] = {{"lambda_reg", hyper_.lambda_reg}, {"epochs", hyper_.epochs}};
    j["weights"] = weights_;
    j["bias"] = bias_;
    auto& ranges = j["feature_ranges"] = nlohmann::json::array();
    for (const auto& [low, high] : feature_ranges_) {
        ranges.push_back({low, high});
    }
    return j.dump();
}

}  // namespace calib

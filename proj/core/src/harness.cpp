#include "calib/harness.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "calib/errors.hpp"
#include "calib/rng.hpp"

namespace calib {

namespace {

constexpr std::uint64_t kReferenceStream = 0xcafe01;
constexpr std::uint64_t kRepetitionStream = 0xcafe02;

std::string format_double(double v) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(6) << v;
    return out.str();
}

}  // namespace

ParameterVector reference_true_vector() {
    return {0.639, 0.129, 0.44, 30.0, 14.0, 0.002, 0.012};
}

double standardized_l2(const ParameterVector& pred, const ParameterVector& truth,
                       const ParameterRanges& ranges) {
    if (pred.size() != truth.size() || pred.size() != ranges.arity()) {
        throw ArityMismatchError("standardized_l2 arity mismatch");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double width = ranges.ranges[i].second - ranges.ranges[i].first;
        const double d = (pred[i] - truth[i]) / width;
        sum += d * d;
    }
    return std::sqrt(sum);
}

std::optional<std::size_t> bms(const std::vector<double>& trace,
                               double success_level_percent) {
    const double threshold = (100.0 - success_level_percent) / 100.0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (trace[i] <= threshold) return i + 1;
    }
    return std::nullopt;
}

std::string MethodSpec::name() const {
    switch (surrogate) {
        case SurrogateKind::None:
            return sampler == SamplerKind::Sobol ? "Sobol" : "Random";
        case SurrogateKind::DecisionTree:
            return sampler == SamplerKind::SurrogateSobol ? "DT Sobol" : "DT Random";
        case SurrogateKind::GradientBoosted:
            return sampler == SamplerKind::SurrogateSobol ? "GBT Sobol" : "GBT Random";
        case SurrogateKind::LinearSvm:
            return sampler == SamplerKind::SurrogateSobol ? "SVM Sobol" : "SVM Random";
    }
    return "?";
}

std::vector<MethodSpec> all_methods() {
    return {
        {SamplerKind::Random, SurrogateKind::None},
        {SamplerKind::SurrogateRandom, SurrogateKind::GradientBoosted},
        {SamplerKind::SurrogateRandom, SurrogateKind::DecisionTree},
        {SamplerKind::SurrogateRandom, SurrogateKind::LinearSvm},
        {SamplerKind::Sobol, SurrogateKind::None},
        {SamplerKind::SurrogateSobol, SurrogateKind::GradientBoosted},
        {SamplerKind::SurrogateSobol, SurrogateKind::DecisionTree},
        {SamplerKind::SurrogateSobol, SurrogateKind::LinearSvm},
    };
}

SanityReport sanity_check(const ParameterVector& theta_star,
                          const CalibrationConfig& cfg,
                          const std::vector<double>& success_levels) {
    const AbmParams params = validate_params(theta_star);
    const EpidemicSeries reference = simulate(
        params, cfg.sim, rng::hash2(cfg.master_seed, kReferenceStream));

    SanityReport report;
    report.result = run_calibration(cfg, reference);
    report.true_vector = theta_star;
    report.l2 = standardized_l2(report.result.best_vector, theta_star, cfg.ranges);
    report.success_levels = success_levels;
    for (double level : success_levels) {
        report.bms_per_level.push_back(bms(report.result.best_statistic_trace, level));
    }
    return report;
}

CalibrationConfig configure_method(const CalibrationConfig& base,
                                   const MethodSpec& method, std::size_t n_params,
                                   const ParameterVector& true_vector) {
    if (n_params < 1 || n_params > true_vector.size()) {
        throw ConfigError("n_params outside 1..arity");
    }
    CalibrationConfig cfg = base;
    cfg.sampler_kind = method.sampler;
    cfg.surrogate_kind = method.surrogate;
    cfg.pinned.is_pinned.assign(true_vector.size(), true);
    cfg.pinned.pinned_values = true_vector;
    for (std::size_t i = 0; i < n_params; ++i) cfg.pinned.is_pinned[i] = false;
    return cfg;
}

std::string experiment_spec_to_json(const ExperimentSpec& spec) {
    nlohmann::json j;
    j["max_params"] = spec.max_params;
    j["true_vector"] = spec.true_vector;
    j["repetitions"] = spec.repetitions;
    auto& methods = j["method_matrix"] = nlohmann::json::array();
    for (const MethodSpec& m : spec.method_matrix) {
        methods.push_back({{"sampler_kind", to_string(m.sampler)},
                           {"surrogate_kind", to_string(m.surrogate)}});
    }
    j["success_levels"] = spec.success_levels;
    return j.dump(2);
}

ExperimentSpec experiment_spec_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad experiment spec: ") + e.what());
    }
    for (const auto& [key, value] : j.items()) {
        if (key != "max_params" && key != "true_vector" && key != "repetitions" &&
            key != "method_matrix" && key != "success_levels") {
            throw ConfigError("unknown key '" + key + "' in experiment spec");
        }
    }
    ExperimentSpec spec;
    try {
        if (j.contains("max_params")) spec.max_params = j["max_params"];
        if (j.contains("true_vector")) spec.true_vector = j["true_vector"].get<ParameterVector>();
        if (j.contains("repetitions")) spec.repetitions = j["repetitions"];
        if (j.contains("method_matrix")) {
            spec.method_matrix.clear();
            for (const auto& m : j["method_matrix"]) {
                for (const auto& [key, value] : m.items()) {
                    if (key != "sampler_kind" && key != "surrogate_kind") {
                        throw ConfigError("unknown key '" + key + "' in method");
                    }
                }
                spec.method_matrix.push_back(
                    {sampler_kind_from_string(m.at("sampler_kind")),
                     surrogate_kind_from_string(m.at("surrogate_kind"))});
            }
        }
        if (j.contains("success_levels")) {
            spec.success_levels = j["success_levels"].get<std::vector<double>>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad experiment spec value: ") + e.what());
    }
    return spec;
}

ExperimentReport run_experiment_suite(const ExperimentSpec& spec,
                                      const CalibrationConfig& cfg_base,
                                      std::ostream* log) {
    ExperimentReport report;
    report.success_levels = spec.success_levels;

    for (const MethodSpec& method : spec.method_matrix) {
        for (std::size_t n_params = 1; n_params <= spec.max_params; ++n_params) {
            ExperimentCell cell;
            cell.method = method.name();
            cell.n_params = n_params;
            std::vector<double> bms_sum(spec.success_levels.size(), 0.0);
            std::vector<std::size_t> bms_count(spec.success_levels.size(), 0);

            for (std::size_t rep = 0; rep < spec.repetitions; ++rep) {
                // Redraw the calibrated components of the true vector; fixed
                // components keep their reference values.
                ParameterVector truth = spec.true_vector;
                rng::UniformSource source(rng::hash4(
                    cfg_base.master_seed, kRepetitionStream, n_params, rep));
                CalibrationConfig cfg =
                    configure_method(cfg_base, method, n_params, spec.true_vector);
                for (std::size_t i = 0; i < n_params; ++i) {
                    const auto [low, high] = cfg.ranges.ranges[i];
                    double v;
                    do {
                        v = source.next_in(low, high);
                    } while (v <= low || v >= high);
                    truth[i] = v;
                }
                cfg.master_seed =
                    rng::hash4(cfg_base.master_seed, 0xcafe03, n_params, rep);

                const SanityReport run = sanity_check(truth, cfg, spec.success_levels);
                cell.mean_l2 += run.l2;
                cell.mean_ks += run.result.best_statistic;
                for (std::size_t lv = 0; lv < spec.success_levels.size(); ++lv) {
                    if (run.bms_per_level[lv]) {
                        bms_sum[lv] += static_cast<double>(*run.bms_per_level[lv]);
                        ++bms_count[lv];
                    }
                }
                if (log) {
                    *log << cell.method << " n_params=" << n_params
                         << " rep=" << rep << " ks=" << run.result.best_statistic
                         << " l2=" << run.l2 << '\n';
                }
            }
            const auto reps = static_cast<double>(spec.repetitions);
            cell.mean_l2 /= reps;
            cell.mean_ks /= reps;
            for (std::size_t lv = 0; lv < spec.success_levels.size(); ++lv) {
                cell.mean_bms.push_back(
                    bms_count[lv] == 0
                        ? std::nullopt
                        : std::optional<double>(bms_sum[lv] /
                                                static_cast<double>(bms_count[lv])));
            }
            report.cells.push_back(std::move(cell));
        }
    }
    return report;
}

std::string ExperimentReport::table2_csv() const {
    std::size_t max_params = 0;
    for (const ExperimentCell& c : cells) max_params = std::max(max_params, c.n_params);

    std::ostringstream out;
    out << "method";
    for (std::size_t p = 1; p <= max_params; ++p) out << ",l2_" << p;
    for (std::size_t p = 1; p <= max_params; ++p) out << ",ks_" << p;
    out << '\n';

    std::vector<std::string> order;
    for (const ExperimentCell& c : cells) {
        if (order.empty() || order.back() != c.method) order.push_back(c.method);
    }
    for (const std::string& method : order) {
        out << method;
        for (const char* field : {"l2", "ks"}) {
            for (std::size_t p = 1; p <= max_params; ++p) {
                out << ',';
                for (const ExperimentCell& c : cells) {
                    if (c.method == method && c.n_params == p) {
                        out << format_double(std::string(field) == "l2" ? c.mean_l2
                                                                        : c.mean_ks);
                        break;
                    }
                }
            }
        }
        out << '\n';
    }
    return out.str();
}

std::string ExperimentReport::table3_csv() const {
    std::size_t max_params = 0;
    for (const ExperimentCell& c : cells) max_params = std::max(max_params, c.n_params);

    std::ostringstream out;
    out << "method";
    for (double level : success_levels) {
        std::ostringstream header;
        header << "bms_" << level;
        out << ',' << header.str();
    }
    out << '\n';
    for (const ExperimentCell& c : cells) {
        if (c.n_params != max_params) continue;
        out << c.method;
        for (const auto& mean : c.mean_bms) {
            out << ',';
            if (mean) {
                out << format_double(*mean);
            } else {
                out << "NR";
            }
        }
        out << '\n';
    }
    return out.str();
}

CalibrationConfig profile_config(const std::string& name) {
    CalibrationConfig cfg;
    if (name == "desk") {
        cfg.sim.population_size = 300;
        cfg.sim.initial_infected = 3;
        cfg.sim.horizon_steps = 2000;
        cfg.abm_min_budget = 200;
        cfg.abm_max_budget = 1000;
        cfg.batch_size = 25;
        return cfg;
    }
    if (name == "paper") {
        cfg.sim.population_size = 500;
        cfg.sim.initial_infected = 5;
        cfg.sim.horizon_steps = 2000;
        cfg.abm_min_budget = 500;
        cfg.abm_max_budget = 2500;
        cfg.batch_size = 50;
        return cfg;
    }
    throw ConfigError("unknown profile: " + name);
}

}  // namespace calib

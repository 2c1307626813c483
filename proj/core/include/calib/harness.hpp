#ifndef CALIB_HARNESS_HPP
#define CALIB_HARNESS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "calib/engine.hpp"

namespace calib {

// Reference truth: beta, reinfection, death, infection period [days],
// detection time [days], speed, interaction radius.
ParameterVector reference_true_vector();

// Per-dimension range-normalised Euclidean distance.
double standardized_l2(const ParameterVector& pred, const ParameterVector& truth,
                       const ParameterRanges& ranges);

// 1-based index of the first batch whose running-min KS statistic reaches
// (100 - success_level_percent)/100; nullopt when never reached.
std::optional<std::size_t> bms(const std::vector<double>& trace,
                               double success_level_percent);

struct MethodSpec {
    SamplerKind sampler;
    SurrogateKind surrogate;

    std::string name() const;
};

// All eight sampler/surrogate combinations.
std::vector<MethodSpec> all_methods();

struct SanityReport {
    CalibrationResult result;
    ParameterVector true_vector;
    double l2 = 0.0;
    std::vector<std::optional<std::size_t>> bms_per_level;
    std::vector<double> success_levels;
};

// Simulates the reference from theta_star, then calibrates against it.
SanityReport sanity_check(const ParameterVector& theta_star,
                          const CalibrationConfig& cfg,
                          const std::vector<double>& success_levels = {97.0, 97.5,
                                                                       98.0, 98.5});

struct ExperimentSpec {
    std::size_t max_params = 7;       // calibrates prefixes 1..max_params
    ParameterVector true_vector = reference_true_vector();
    std::size_t repetitions = 10;
    std::vector<MethodSpec> method_matrix = all_methods();
    std::vector<double> success_levels = {97.0, 97.5, 98.0, 98.5};
};

std::string experiment_spec_to_json(const ExperimentSpec& spec);
ExperimentSpec experiment_spec_from_json(const std::string& text);

struct ExperimentCell {
    std::string method;
    std::size_t n_params = 0;
    double mean_l2 = 0.0;
    double mean_ks = 0.0;
    // Mean finite BMS per success level; nullopt when no repetition reached it.
    std::vector<std::optional<double>> mean_bms;
};

struct ExperimentReport {
    std::vector<ExperimentCell> cells;
    std::vector<double> success_levels;

    // Table of mean L2 and KS per method x parameter count.
    std::string table2_csv() const;
    // Mean BMS per method x success level at the highest parameter count.
    std::string table3_csv() const;
};

// Runs method x n_params cells, `repetitions` runs each with redrawn true
// values for the calibrated components. Progress lines go to `log` when set.
ExperimentReport run_experiment_suite(const ExperimentSpec& spec,
                                      const CalibrationConfig& cfg_base,
                                      std::ostream* log = nullptr);

// Applies the sampler/surrogate pair and the coordinate pinning for an
// n-parameter calibration of the contiguous prefix.
CalibrationConfig configure_method(const CalibrationConfig& base,
                                   const MethodSpec& method, std::size_t n_params,
                                   const ParameterVector& true_vector);

// Named profiles: "desk" (population 300, budgets 200/1000, batch 25) and
// "paper" (population 500, budgets 500/2500, batch 50).
CalibrationConfig profile_config(const std::string& name);

}  // namespace calib

#endif

#ifndef CALIB_ENGINE_HPP
#define CALIB_ENGINE_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "calib/abm.hpp"
#include "calib/ks.hpp"
#include "calib/sampling.hpp"
#include "calib/surrogate.hpp"

namespace calib {

enum class SamplerKind : std::uint8_t { Random, Sobol, SurrogateRandom, SurrogateSobol };
enum class SurrogateKind : std::uint8_t { None, DecisionTree, GradientBoosted, LinearSvm };

std::string to_string(SamplerKind kind);
std::string to_string(SurrogateKind kind);
SamplerKind sampler_kind_from_string(const std::string& s);
SurrogateKind surrogate_kind_from_string(const std::string& s);

struct CalibrationConfig {
    SamplerKind sampler_kind = SamplerKind::Random;
    SurrogateKind surrogate_kind = SurrogateKind::None;
    std::size_t abm_min_budget = 500;
    std::size_t abm_max_budget = 2500;
    std::size_t batch_size = 50;
    double ks_threshold = 0.005;
    double alpha = 0.01;
    double epsilon_positive = 0.9;
    ParameterRanges ranges = ParameterRanges::defaults();
    SimConfig sim;
    std::uint64_t master_seed = 0;

    // Coordinates held fixed during calibration (experiment harness use).
    PinnedCoordinates pinned = PinnedCoordinates::none(kNumParams);

    // Candidate-pool sizing.
    std::size_t pool_size = 10000;
    std::size_t pool_oversample = 2;

    // Surrogate hyperparameters and confidence gate.
    DecisionTreeHyper dt_hyper;
    GbtHyper gbt_hyper;
    SvmHyper svm_hyper;
    double split_ratio = 0.8;
    double f1_threshold = 0.9;

    // Parallelism width for mini-batch evaluation; results are identical to
    // the serial order for any value.
    std::size_t threads = 1;

    void check() const;  // throws ConfigError
};

struct LabeledSample {
    ParameterVector vector;
    double statistic;
    Label label;
    std::size_t batch_index;
    std::uint64_t seed_used;

    bool operator==(const LabeledSample&) const = default;
};

struct GroundTruthDb {
    std::vector<LabeledSample> samples;

    bool operator==(const GroundTruthDb&) const = default;
};

enum class Termination : std::uint8_t { KsThresholdMet, MaxBudgetExhausted };

struct CalibrationResult {
    ParameterVector best_vector;
    double best_statistic = 1.0;
    std::size_t evaluations_used = 0;
    std::size_t batches_used = 0;
    std::vector<double> best_statistic_trace;  // per-batch running minimum
    Termination terminated_by = Termination::MaxBudgetExhausted;
    GroundTruthDb db;

    std::string to_json() const;  // db excluded; persisted separately
};

// Per-sample simulation seed, a pure function of (master_seed, batch, slot),
// so parallel and serial evaluation agree bitwise.
std::uint64_t sample_seed(std::uint64_t master_seed, std::size_t batch_index,
                          std::size_t slot);

std::vector<LabeledSample> evaluate_minibatch(
    const std::vector<ParameterVector>& batch, const EpidemicSeries& reference,
    const CalibrationConfig& cfg, std::size_t batch_index);

CalibrationResult run_calibration(const CalibrationConfig& cfg,
                                  const EpidemicSeries& reference);

// Sample with the minimum statistic; ties break to the earliest insertion.
std::pair<ParameterVector, double> best_candidate(const GroundTruthDb& db);

// JSON-lines, one sample per line. load(persist(db)) == db.
void persist_db(const GroundTruthDb& db, const std::filesystem::path& path);
GroundTruthDb load_db(const std::filesystem::path& path);

// Full config as JSON (also the on-disk config format: field names match,
// unknown keys rejected).
std::string config_to_json(const CalibrationConfig& cfg);
CalibrationConfig config_from_json(const std::string& text);

}  // namespace calib

#endif

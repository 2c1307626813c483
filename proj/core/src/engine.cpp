#include "calib/engine.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "calib/errors.hpp"
#include "calib/rng.hpp"

namespace calib {

namespace {

// Seed-derivation stream tags.
constexpr std::uint64_t kSampleStream = 0xab01;
constexpr std::uint64_t kDrawStream = 0xab02;
constexpr std::uint64_t kSplitStream = 0xab03;
constexpr std::uint64_t kSvmStream = 0xab04;
constexpr std::uint64_t kReinitStream = 0xab05;
constexpr std::uint64_t kPoolStream = 0xab06;

bool uses_sobol(SamplerKind kind) {
    return kind == SamplerKind::Sobol || kind == SamplerKind::SurrogateSobol;
}

bool uses_surrogate(SamplerKind kind) {
    return kind == SamplerKind::SurrogateRandom || kind == SamplerKind::SurrogateSobol;
}

nlohmann::json ranges_to_json(const ParameterRanges& ranges) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& [low, high] : ranges.ranges) j.push_back({low, high});
    return j;
}

ParameterRanges ranges_from_json(const nlohmann::json& j) {
    ParameterRanges out;
    for (const auto& pair : j) {
        out.ranges.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
    }
    return out;
}

void reject_unknown_keys(const nlohmann::json& j,
                         const std::set<std::string>& known,
                         const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

}  // namespace

std::string to_string(SamplerKind kind) {
    switch (kind) {
        case SamplerKind::Random: return "random";
        case SamplerKind::Sobol: return "sobol";
        case SamplerKind::SurrogateRandom: return "surrogate_random";
        case SamplerKind::SurrogateSobol: return "surrogate_sobol";
    }
    return "?";
}

std::string to_string(SurrogateKind kind) {
    switch (kind) {
        case SurrogateKind::None: return "none";
        case SurrogateKind::DecisionTree: return "decision_tree";
        case SurrogateKind::GradientBoosted: return "gradient_boosted";
        case SurrogateKind::LinearSvm: return "linear_svm";
    }
    return "?";
}

SamplerKind sampler_kind_from_string(const std::string& s) {
    if (s == "random") return SamplerKind::Random;
    if (s == "sobol") return SamplerKind::Sobol;
    if (s == "surrogate_random") return SamplerKind::SurrogateRandom;
    if (s == "surrogate_sobol") return SamplerKind::SurrogateSobol;
    throw ConfigError("unknown sampler_kind: " + s);
}

SurrogateKind surrogate_kind_from_string(const std::string& s) {
    if (s == "none") return SurrogateKind::None;
    if (s == "decision_tree") return SurrogateKind::DecisionTree;
    if (s == "gradient_boosted") return SurrogateKind::GradientBoosted;
    if (s == "linear_svm") return SurrogateKind::LinearSvm;
    throw ConfigError("unknown surrogate_kind: " + s);
}

void CalibrationConfig::check() const {
    if (batch_size == 0) throw ConfigError("batch_size must be positive");
    if (abm_min_budget > abm_max_budget) {
        throw ConfigError("abm_min_budget exceeds abm_max_budget");
    }
    if (abm_max_budget % batch_size != 0) {
        throw ConfigError("abm_max_budget must be a multiple of batch_size");
    }
    if (!(epsilon_positive >= 0.0 && epsilon_positive <= 1.0)) {
        throw ConfigError("epsilon_positive must lie in [0,1]");
    }
    const bool plain = sampler_kind == SamplerKind::Random ||
                       sampler_kind == SamplerKind::Sobol;
    if (plain != (surrogate_kind == SurrogateKind::None)) {
        throw ConfigError("surrogate_kind must be none iff sampler is plain");
    }
    if (ranges.arity() != pinned.is_pinned.size()) {
        throw ConfigError("pinned mask arity does not match ranges");
    }
    if (pinned.free_count() == 0) throw ConfigError("no free coordinates");
    if (pool_size < batch_size) throw ConfigError("pool_size below batch_size");
    ranges.check();
}

std::uint64_t sample_seed(std::uint64_t master_seed, std::size_t batch_index,
                          std::size_t slot) {
    return rng::hash4(master_seed, kSampleStream, batch_index, slot);
}

std::vector<LabeledSample> evaluate_minibatch(
    const std::vector<ParameterVector>& batch, const EpidemicSeries& reference,
    const CalibrationConfig& cfg, std::size_t batch_index) {
    std::vector<LabeledSample> out(batch.size());
    const std::size_t width = std::max<std::size_t>(cfg.threads, 1);

    auto worker = [&](std::size_t first, std::size_t stride) {
        for (std::size_t slot = first; slot < batch.size(); slot += stride) {
            const std::uint64_t seed = sample_seed(cfg.master_seed, batch_index, slot);
            const AbmParams params = validate_params(batch[slot]);
            const EpidemicSeries sim = simulate(params, cfg.sim, seed);
            const KsOutcome outcome = evaluate_candidate(reference, sim, cfg.alpha);
            out[slot] = LabeledSample{batch[slot], outcome.statistic, outcome.label,
                                      batch_index, seed};
        }
    };

    if (width == 1 || batch.size() == 1) {
        worker(0, 1);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(width);
        for (std::size_t t = 0; t < width; ++t) {
            threads.emplace_back(worker, t, width);
        }
        for (std::thread& t : threads) t.join();
    }
    return out;
}

std::pair<ParameterVector, double> best_candidate(const GroundTruthDb& db) {
    if (db.samples.empty()) throw EmptyDbError();
    const LabeledSample* best = &db.samples.front();
    for (const LabeledSample& s : db.samples) {
        if (s.statistic < best->statistic) best = &s;
    }
    return {best->vector, best->statistic};
}

CalibrationResult run_calibration(const CalibrationConfig& cfg,
                                  const EpidemicSeries& reference) {
    cfg.check();
    const std::size_t n_params = cfg.pinned.free_count();
    const bool sobol = uses_sobol(cfg.sampler_kind);
    const bool assisted = uses_surrogate(cfg.sampler_kind);

    SobolGenerator sobol_gen(std::max<std::size_t>(n_params, 1));
    std::size_t pool_refills = 0;
    auto base_pool = [&](std::size_t n) {
        if (sobol) return generate_pool_sobol(n, cfg.ranges, cfg.pinned, sobol_gen);
        return generate_pool_random(
            n, cfg.ranges, cfg.pinned,
            rng::hash3(cfg.master_seed, kPoolStream, pool_refills++));
    };

    CandidatePool pool = base_pool(cfg.pool_size);
    std::set<ParameterVector> evaluated;
    CalibrationResult result;
    GroundTruthDb& db = result.db;

    std::size_t batch_index = 0;
    while (true) {
        // Assemble a batch of never-evaluated vectors.
        std::vector<ParameterVector> batch;
        batch.reserve(cfg.batch_size);
        std::size_t attempt = 0;
        while (batch.size() < cfg.batch_size) {
            if (pool.vectors.empty()) pool = base_pool(cfg.pool_size);
            auto drawn = draw_minibatch(
                pool, 1,
                rng::hash4(cfg.master_seed, kDrawStream, batch_index, attempt++));
            if (evaluated.insert(drawn[0]).second) {
                batch.push_back(std::move(drawn[0]));
            }
        }

        auto samples = evaluate_minibatch(batch, reference, cfg, batch_index);
        for (LabeledSample& s : samples) db.samples.push_back(std::move(s));
        ++result.batches_used;
        result.evaluations_used += cfg.batch_size;

        auto [best_vec, best_stat] = best_candidate(db);
        result.best_vector = std::move(best_vec);
        result.best_statistic = best_stat;
        result.best_statistic_trace.push_back(best_stat);

        if (assisted) {
            std::size_t n_pos = 0;
            for (const LabeledSample& s : db.samples) {
                if (s.label == Label::Positive) ++n_pos;
            }
            if (n_pos > 0 && n_pos < db.samples.size() && db.samples.size() >= 5) {
                TrainingSet full;
                for (const LabeledSample& s : db.samples) full.add(s.vector, s.label);
                auto [train, val] = split_train_validation(
                    full, cfg.split_ratio,
                    rng::hash3(cfg.master_seed, kSplitStream, batch_index));
                try {
                    std::unique_ptr<SurrogateClassifier> model;
                    switch (cfg.surrogate_kind) {
                        case SurrogateKind::DecisionTree:
                            model = std::make_unique<DecisionTreeModel>(
                                train_decision_tree(train, cfg.dt_hyper));
                            break;
                        case SurrogateKind::GradientBoosted:
                            model = std::make_unique<GradientBoostedModel>(
                                train_gbt(train, cfg.gbt_hyper));
                            break;
                        case SurrogateKind::LinearSvm:
                            model = std::make_unique<LinearSvmModel>(train_svm(
                                train, cfg.svm_hyper, cfg.ranges.ranges,
                                rng::hash3(cfg.master_seed, kSvmStream, batch_index)));
                            break;
                        case SurrogateKind::None:
                            break;
                    }
                    if (model) {
                        ValidationReport report = validate_model(*model, val);
                        report.n_train = train.size();
                        if (is_confident(report, db.samples.size(), cfg.batch_size,
                                         n_params, cfg.f1_threshold)) {
                            pool = reinitialize_pool_epsilon_greedy(
                                *model, sobol ? PoolOrigin::Sobol : PoolOrigin::Random,
                                cfg.pool_size, cfg.epsilon_positive, cfg.ranges,
                                cfg.pinned,
                                rng::hash3(cfg.master_seed, kReinitStream, batch_index),
                                sobol ? &sobol_gen : nullptr, cfg.pool_oversample);
                        }
                    }
                } catch (const SingleClassError&) {
                    // Split left one side single-class; train again next batch.
                }
            }
        }

        if (result.evaluations_used >= cfg.abm_min_budget &&
            result.best_statistic <= cfg.ks_threshold) {
            result.terminated_by = Termination::KsThresholdMet;
            break;
        }
        if (result.evaluations_used >= cfg.abm_max_budget) {
            result.terminated_by = Termination::MaxBudgetExhausted;
            break;
        }
        ++batch_index;
    }
    return result;
}

std::string CalibrationResult::to_json() const {
    nlohmann::json j;
    j["best_vector"] = best_vector;
    j["best_statistic"] = best_statistic;
    j["evaluations_used"] = evaluations_used;
    j["batches_used"] = batches_used;
    j["best_statistic_trace"] = best_statistic_trace;
    j["terminated_by"] = terminated_by == Termination::KsThresholdMet
                             ? "ks_threshold_met"
                             : "max_budget_exhausted";
    return j.dump(2);
}

void persist_db(const GroundTruthDb& db, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    for (const LabeledSample& s : db.samples) {
        nlohmann::json j;
        j["vector"] = s.vector;
        j["statistic"] = s.statistic;
        j["label"] = s.label == Label::Positive ? "positive" : "negative";
        j["batch_index"] = s.batch_index;
        j["seed_used"] = s.seed_used;
        out << j.dump() << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

GroundTruthDb load_db(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    GroundTruthDb db;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            LabeledSample s;
            s.vector = j.at("vector").get<ParameterVector>();
            s.statistic = j.at("statistic").get<double>();
            const std::string label = j.at("label").get<std::string>();
            if (label != "positive" && label != "negative") {
                throw ConfigError("bad label");
            }
            s.label = label == "positive" ? Label::Positive : Label::Negative;
            s.batch_index = j.at("batch_index").get<std::size_t>();
            s.seed_used = j.at("seed_used").get<std::uint64_t>();
            db.samples.push_back(std::move(s));
        } catch (const std::exception& e) {
            throw SchemaError(lineno, "malformed sample at line " +
                                          std::to_string(lineno) + ": " + e.what());
        }
    }
    return db;
}

std::string config_to_json(const CalibrationConfig& cfg) {
    nlohmann::json j;
    j["sampler_kind"] = to_string(cfg.sampler_kind);
    j["surrogate_kind"] = to_string(cfg.surrogate_kind);
    j["abm_min_budget"] = cfg.abm_min_budget;
    j["abm_max_budget"] = cfg.abm_max_budget;
    j["batch_size"] = cfg.batch_size;
    j["ks_threshold"] = cfg.ks_threshold;
    j["alpha"] = cfg.alpha;
    j["epsilon_positive"] = cfg.epsilon_positive;
    j["ranges"] = ranges_to_json(cfg.ranges);
    j["sim"] = {{"population_size", cfg.sim.population_size},
                {"initial_infected", cfg.sim.initial_infected},
                {"horizon_steps", cfg.sim.horizon_steps},
                {"steps_per_day", cfg.sim.steps_per_day}};
    j["master_seed"] = cfg.master_seed;
    j["pinned"] = {{"is_pinned", cfg.pinned.is_pinned},
                   {"pinned_values", cfg.pinned.pinned_values}};
    j["pool_size"] = cfg.pool_size;
    j["pool_oversample"] = cfg.pool_oversample;
    j["dt_hyper"] = {{"max_depth", cfg.dt_hyper.max_depth},
                     {"min_samples_split", cfg.dt_hyper.min_samples_split}};
    j["gbt_hyper"] = {{"n_rounds", cfg.gbt_hyper.n_rounds},
                      {"learning_rate", cfg.gbt_hyper.learning_rate},
                      {"max_depth", cfg.gbt_hyper.max_depth},
                      {"lambda_l2", cfg.gbt_hyper.lambda_l2}};
    j["svm_hyper"] = {{"lambda_reg", cfg.svm_hyper.lambda_reg},
                      {"epochs", cfg.svm_hyper.epochs}};
    j["split_ratio"] = cfg.split_ratio;
    j["f1_threshold"] = cfg.f1_threshold;
    j["threads"] = cfg.threads;
    return j.dump(2);
}

CalibrationConfig config_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad config document: ") + e.what());
    }
    reject_unknown_keys(
        j,
        {"sampler_kind", "surrogate_kind", "abm_min_budget", "abm_max_budget",
         "batch_size", "ks_threshold", "alpha", "epsilon_positive", "ranges", "sim",
         "master_seed", "pinned", "pool_size", "pool_oversample", "dt_hyper",
         "gbt_hyper", "svm_hyper", "split_ratio", "f1_threshold", "threads"},
        "config");

    CalibrationConfig cfg;
    try {
        if (j.contains("sampler_kind")) {
            cfg.sampler_kind = sampler_kind_from_string(j["sampler_kind"]);
        }
        if (j.contains("surrogate_kind")) {
            cfg.surrogate_kind = surrogate_kind_from_string(j["surrogate_kind"]);
        }
        if (j.contains("abm_min_budget")) cfg.abm_min_budget = j["abm_min_budget"];
        if (j.contains("abm_max_budget")) cfg.abm_max_budget = j["abm_max_budget"];
        if (j.contains("batch_size")) cfg.batch_size = j["batch_size"];
        if (j.contains("ks_threshold")) cfg.ks_threshold = j["ks_threshold"];
        if (j.contains("alpha")) cfg.alpha = j["alpha"];
        if (j.contains("epsilon_positive")) cfg.epsilon_positive = j["epsilon_positive"];
        if (j.contains("ranges")) cfg.ranges = ranges_from_json(j["ranges"]);
        if (j.contains("sim")) {
            const auto& s = j["sim"];
            reject_unknown_keys(s,
                                {"population_size", "initial_infected",
                                 "horizon_steps", "steps_per_day"},
                                "sim");
            if (s.contains("population_size")) cfg.sim.population_size = s["population_size"];
            if (s.contains("initial_infected")) cfg.sim.initial_infected = s["initial_infected"];
            if (s.contains("horizon_steps")) cfg.sim.horizon_steps = s["horizon_steps"];
            if (s.contains("steps_per_day")) cfg.sim.steps_per_day = s["steps_per_day"];
        }
        if (j.contains("master_seed")) cfg.master_seed = j["master_seed"];
        cfg.pinned = PinnedCoordinates::none(cfg.ranges.arity());
        if (j.contains("pinned")) {
            const auto& p = j["pinned"];
            reject_unknown_keys(p, {"is_pinned", "pinned_values"}, "pinned");
            cfg.pinned.is_pinned = p.at("is_pinned").get<std::vector<bool>>();
            cfg.pinned.pinned_values = p.at("pinned_values").get<ParameterVector>();
        }
        if (j.contains("pool_size")) cfg.pool_size = j["pool_size"];
        if (j.contains("pool_oversample")) cfg.pool_oversample = j["pool_oversample"];
        if (j.contains("dt_hyper")) {
            const auto& h = j["dt_hyper"];
            reject_unknown_keys(h, {"max_depth", "min_samples_split"}, "dt_hyper");
            if (h.contains("max_depth")) cfg.dt_hyper.max_depth = h["max_depth"];
            if (h.contains("min_samples_split")) cfg.dt_hyper.min_samples_split = h["min_samples_split"];
        }
        if (j.contains("gbt_hyper")) {
            const auto& h = j["gbt_hyper"];
            reject_unknown_keys(h, {"n_rounds", "learning_rate", "max_depth", "lambda_l2"},
                                "gbt_hyper");
            if (h.contains("n_rounds")) cfg.gbt_hyper.n_rounds = h["n_rounds"];
            if (h.contains("learning_rate")) cfg.gbt_hyper.learning_rate = h["learning_rate"];
            if (h.contains("max_depth")) cfg.gbt_hyper.max_depth = h["max_depth"];
            if (h.contains("lambda_l2")) cfg.gbt_hyper.lambda_l2 = h["lambda_l2"];
        }
        if (j.contains("svm_hyper")) {
            const auto& h = j["svm_hyper"];
            reject_unknown_keys(h, {"lambda_reg", "epochs"}, "svm_hyper");
            if (h.contains("lambda_reg")) cfg.svm_hyper.lambda_reg = h["lambda_reg"];
            if (h.contains("epochs")) cfg.svm_hyper.epochs = h["epochs"];
        }
        if (j.contains("split_ratio")) cfg.split_ratio = j["split_ratio"];
        if (j.contains("f1_threshold")) cfg.f1_threshold = j["f1_threshold"];
        if (j.contains("threads")) cfg.threads = j["threads"];
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    return cfg;
}

}  // namespace calib

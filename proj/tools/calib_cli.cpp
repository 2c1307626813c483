// Command-line experiment harness for the calibration engine.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "calib/engine.hpp"
#include "calib/errors.hpp"
#include "calib/harness.hpp"
#include "calib/sobol.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw calib::IoError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw calib::IoError("cannot write " + path.string());
    out << content;
}

void write_trace_csv(const std::filesystem::path& path,
                     const std::vector<double>& trace) {
    std::ofstream out(path);
    if (!out) throw calib::IoError("cannot write " + path.string());
    out << "batch,best_ks\n";
    for (std::size_t i = 0; i < trace.size(); ++i) {
        out << i + 1 << ',' << trace[i] << '\n';
    }
}

void write_manifest(const std::filesystem::path& path,
                    const calib::CalibrationConfig& cfg) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["config"] = nlohmann::json::parse(calib::config_to_json(cfg));
    write_file(path, j.dump(2) + "\n");
}

nlohmann::json sanity_report_json(const calib::SanityReport& report) {
    nlohmann::json j;
    j["best_vector"] = report.result.best_vector;
    j["best_statistic"] = report.result.best_statistic;
    j["true_vector"] = report.true_vector;
    j["standardized_l2"] = report.l2;
    j["evaluations_used"] = report.result.evaluations_used;
    j["batches_used"] = report.result.batches_used;
    j["terminated_by"] =
        report.result.terminated_by == calib::Termination::KsThresholdMet
            ? "ks_threshold_met"
            : "max_budget_exhausted";
    auto& levels = j["bms"] = nlohmann::json::array();
    for (std::size_t i = 0; i < report.success_levels.size(); ++i) {
        nlohmann::json entry;
        entry["success_level"] = report.success_levels[i];
        if (report.bms_per_level[i]) {
            entry["batches"] = *report.bms_per_level[i];
        } else {
            entry["batches"] = nullptr;
        }
        levels.push_back(entry);
    }
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Agent-based epidemic model calibration harness"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::string out_dir = ".";
    std::string profile = "desk";
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    app.add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
    app.add_option("--profile", profile, "Config profile: desk|paper")
        ->check(CLI::IsMember({"desk", "paper"}))
        ->capture_default_str();
    app.add_option("--seed", seed, "Master seed")->capture_default_str();
    app.add_option("--threads", threads, "Parallelism width for batch evaluation")
        ->capture_default_str();

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Run the ABM once, emit a CSV series");
    std::vector<double> sim_params = calib::reference_true_vector();
    std::string sim_out = "series.csv";
    sim_cmd->add_option("--params", sim_params, "7 parameter values")->expected(7);
    sim_cmd->add_option("--out", sim_out, "Output CSV file")->capture_default_str();

    // calibrate
    auto* cal_cmd = app.add_subcommand("calibrate", "Calibrate against a reference series");
    std::string cal_config;
    std::string cal_reference;
    cal_cmd->add_option("--config", cal_config, "CalibrationConfig JSON file")->required();
    cal_cmd
        ->add_option("--reference", cal_reference,
                     "Reference series (CSV with 'infected' header)")
        ->required();

    // sanity-check
    auto* sanity_cmd = app.add_subcommand(
        "sanity-check", "Recover a known parameter vector from its own output");
    std::vector<double> sanity_theta = calib::reference_true_vector();
    std::string sanity_sampler = "random";
    std::string sanity_surrogate = "none";
    std::size_t sanity_n_params = 1;
    sanity_cmd->add_option("--theta", sanity_theta, "True 7-vector")->expected(7);
    sanity_cmd->add_option("--sampler", sanity_sampler, "Sampler kind")
        ->capture_default_str();
    sanity_cmd->add_option("--surrogate", sanity_surrogate, "Surrogate kind")
        ->capture_default_str();
    sanity_cmd->add_option("--n-params", sanity_n_params, "Calibrated prefix length")
        ->check(CLI::Range(1, 7))
        ->capture_default_str();

    // suite
    auto* suite_cmd = app.add_subcommand("suite", "Run an experiment grid, emit CSV tables");
    std::string suite_spec;
    suite_cmd->add_option("--spec", suite_spec, "ExperimentSpec JSON file");

    // sobol-dump
    auto* sobol_cmd = app.add_subcommand("sobol-dump", "Emit Sobol points as CSV");
    std::size_t sobol_dim = 7;
    std::size_t sobol_count = 100;
    std::string sobol_out = "sobol.csv";
    sobol_cmd->add_option("--dimension", sobol_dim, "Point dimension")
        ->capture_default_str();
    sobol_cmd->add_option("--count", sobol_count, "Number of points")
        ->capture_default_str();
    sobol_cmd->add_option("--out", sobol_out, "Output CSV file")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        std::filesystem::create_directories(out_dir);
        const std::filesystem::path out(out_dir);

        if (*sim_cmd) {
            const calib::AbmParams params = calib::validate_params(sim_params);
            calib::CalibrationConfig cfg = calib::profile_config(profile);
            const calib::EpidemicSeries series = calib::simulate(params, cfg.sim, seed);
            std::ofstream file(out / sim_out);
            if (!file) throw calib::IoError("cannot write " + sim_out);
            calib::write_series_csv(series, file);
            std::cout << "wrote " << (out / sim_out).string() << " ("
                      << series.counts.size() << " steps)\n";
        } else if (*cal_cmd) {
            calib::CalibrationConfig cfg = calib::config_from_json(read_file(cal_config));
            if (app.count("--seed")) cfg.master_seed = seed;
            if (app.count("--threads")) cfg.threads = threads;
            cfg.check();
            std::ifstream ref_file(cal_reference);
            if (!ref_file) throw calib::IoError("cannot read " + cal_reference);
            const calib::EpidemicSeries reference = calib::read_series_csv(ref_file);

            const calib::CalibrationResult result = calib::run_calibration(cfg, reference);
            write_file(out / "result.json", result.to_json() + "\n");
            calib::persist_db(result.db, out / "db.jsonl");
            write_trace_csv(out / "trace.csv", result.best_statistic_trace);
            write_manifest(out / "manifest.json", cfg);
            std::cout << "best_ks=" << result.best_statistic
                      << " evaluations=" << result.evaluations_used << "\n";
        } else if (*sanity_cmd) {
            calib::CalibrationConfig cfg = calib::profile_config(profile);
            cfg.master_seed = seed;
            cfg.threads = threads;
            const calib::MethodSpec method{
                calib::sampler_kind_from_string(sanity_sampler),
                calib::surrogate_kind_from_string(sanity_surrogate)};
            cfg = calib::configure_method(cfg, method, sanity_n_params, sanity_theta);
            cfg.check();
            const calib::SanityReport report = calib::sanity_check(sanity_theta, cfg);
            const std::string doc = sanity_report_json(report).dump(2) + "\n";
            write_file(out / "sanity.json", doc);
            std::cout << doc;
        } else if (*suite_cmd) {
            calib::ExperimentSpec spec;
            if (!suite_spec.empty()) {
                spec = calib::experiment_spec_from_json(read_file(suite_spec));
            }
            calib::CalibrationConfig cfg = calib::profile_config(profile);
            cfg.master_seed = seed;
            cfg.threads = threads;
            const calib::ExperimentReport report =
                calib::run_experiment_suite(spec, cfg, &std::cerr);
            write_file(out / "table2.csv", report.table2_csv());
            write_file(out / "table3.csv", report.table3_csv());
            std::cout << "wrote " << (out / "table2.csv").string() << " and "
                      << (out / "table3.csv").string() << "\n";
        } else if (*sobol_cmd) {
            calib::SobolGenerator gen(sobol_dim);
            std::ofstream file(out / sobol_out);
            if (!file) throw calib::IoError("cannot write " + sobol_out);
            for (std::size_t d = 0; d < sobol_dim; ++d) {
                file << (d ? "," : "") << "x" << d + 1;
            }
            file << '\n';
            file.precision(17);
            for (std::size_t k = 0; k < sobol_count; ++k) {
                const auto point = gen.next_point();
                for (std::size_t d = 0; d < point.size(); ++d) {
                    file << (d ? "," : "") << point[d];
                }
                file << '\n';
            }
            std::cout << "wrote " << (out / sobol_out).string() << "\n";
        }
    } catch (const calib::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const calib::BadRangeError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const calib::UnsupportedDimensionError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const calib::OutOfRangeError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const calib::WrongArityError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

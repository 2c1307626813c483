#include <benchmark/benchmark.h>

#include "calib/abm.hpp"
#include "calib/ks.hpp"
#include "calib/sampling.hpp"
#include "calib/sobol.hpp"
#include "calib/surrogate.hpp"

namespace {

calib::AbmParams reference_params() {
    return calib::validate_params({0.639, 0.129, 0.44, 30.0, 14.0, 0.002, 0.012});
}

void BM_SimulateDeskProfile(benchmark::State& state) {
    calib::SimConfig cfg;
    cfg.population_size = static_cast<std::size_t>(state.range(0));
    cfg.initial_infected = cfg.population_size / 100 + 1;
    cfg.horizon_steps = 2000;
    const calib::AbmParams params = reference_params();
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(calib::simulate(params, cfg, seed++));
    }
}
BENCHMARK(BM_SimulateDeskProfile)->Arg(300)->Arg(500);

void BM_KsStatistic(benchmark::State& state) {
    calib::SimConfig cfg;
    cfg.population_size = 300;
    cfg.initial_infected = 3;
    cfg.horizon_steps = 2000;
    const calib::EpidemicSeries a = calib::simulate(reference_params(), cfg, 1);
    const calib::EpidemicSeries b = calib::simulate(reference_params(), cfg, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(calib::ks_statistic(a, b));
    }
}
BENCHMARK(BM_KsStatistic);

void BM_SobolPool(benchmark::State& state) {
    const calib::ParameterRanges ranges = calib::ParameterRanges::defaults();
    const auto pinned = calib::PinnedCoordinates::none(7);
    for (auto _ : state) {
        calib::SobolGenerator gen(7);
        benchmark::DoNotOptimize(
            calib::generate_pool_sobol(10000, ranges, pinned, gen));
    }
}
BENCHMARK(BM_SobolPool);

void BM_TrainDecisionTree(benchmark::State& state) {
    const calib::ParameterRanges ranges = calib::ParameterRanges::defaults();
    const calib::CandidatePool pool = calib::generate_pool_random(
        500, ranges, calib::PinnedCoordinates::none(7), 1);
    calib::TrainingSet set;
    for (std::size_t i = 0; i < pool.vectors.size(); ++i) {
        set.add(pool.vectors[i],
                i % 5 == 0 ? calib::Label::Positive : calib::Label::Negative);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(calib::train_decision_tree(set, {}));
    }
}
BENCHMARK(BM_TrainDecisionTree);

}  // namespace

BENCHMARK_MAIN();

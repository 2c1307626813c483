#include <doctest.h>

#include <sstream>

#include "calib/abm.hpp"
#include "calib/errors.hpp"

using namespace calib;

namespace {

SimConfig small_config() {
    SimConfig cfg;
    cfg.population_size = 100;
    cfg.initial_infected = 5;
    cfg.horizon_steps = 300;
    return cfg;
}

AbmParams reference_params() {
    return validate_params({0.639, 0.129, 0.44, 30.0, 14.0, 0.002, 0.012});
}

}  // namespace

TEST_CASE("validate_params accepts the reference vector") {
    const AbmParams p = validate_params({0.639, 0.129, 0.44, 30, 14, 0.002, 0.012});
    CHECK(p.transmission_probability == 0.639);
    CHECK(p.infection_period == 30.0);
    CHECK(p.interaction_radius == 0.012);
}

TEST_CASE("validate_params rejects out-of-range entries with the 1-based index") {
    try {
        validate_params({1.5, 0.1, 0.1, 10, 5, 0.1, 0.1});
        FAIL("expected OutOfRangeError");
    } catch (const OutOfRangeError& e) {
        CHECK(e.index == 1);
    }
    try {
        validate_params({0.5, 0.5, 0.5, 42, 5, 0.5, 0.5});
        FAIL("expected OutOfRangeError");
    } catch (const OutOfRangeError& e) {
        CHECK(e.index == 4);
    }
    // boundary values are excluded
    CHECK_THROWS_AS(validate_params({0.0, 0.5, 0.5, 10, 5, 0.5, 0.5}), OutOfRangeError);
    CHECK_THROWS_AS(validate_params({0.5, 0.5, 0.5, 10, 5, 0.5, 1.0}), OutOfRangeError);
}

TEST_CASE("validate_params rejects wrong arity") {
    CHECK_THROWS_AS(validate_params({0.5, 0.5}), WrongArityError);
    CHECK_THROWS_AS(validate_params({}), WrongArityError);
}

TEST_CASE("days_to_steps") {
    const double steps_per_day = 1000.0 / 41.0;
    CHECK(days_to_steps(41.0, steps_per_day) == 1000);
    CHECK(days_to_steps(30.0, steps_per_day) == 732);
    CHECK(days_to_steps(0.01, steps_per_day) == 1);
}

TEST_CASE("simulate is deterministic") {
    const SimConfig cfg = small_config();
    const AbmParams p = reference_params();
    const EpidemicSeries a = simulate(p, cfg, 42);
    const EpidemicSeries b = simulate(p, cfg, 42);
    CHECK(a == b);
    const EpidemicSeries c = simulate(p, cfg, 43);
    CHECK(a.counts.size() == c.counts.size());
}

TEST_CASE("horizon consistency: prefix of a long run equals a short run") {
    SimConfig long_cfg = small_config();
    SimConfig short_cfg = small_config();
    short_cfg.horizon_steps = 120;
    const AbmParams p = reference_params();
    const EpidemicSeries full = simulate(p, long_cfg, 7);
    const EpidemicSeries part = simulate(p, short_cfg, 7);
    REQUIRE(part.counts.size() == 120);
    for (std::size_t i = 0; i < part.counts.size(); ++i) {
        CHECK(full.counts[i] == part.counts[i]);
    }
}

TEST_CASE("no-transmission limit: counts non-increasing, eventually zero") {
    SimConfig cfg = small_config();
    cfg.horizon_steps = 900;
    AbmParams p = reference_params();
    p.speed = 1e-300;
    p.interaction_radius = 1e-300;
    p.infection_period = 10.0;  // ~244 steps
    const EpidemicSeries series = simulate(p, cfg, 5);
    for (std::size_t i = 1; i < series.counts.size(); ++i) {
        CHECK(series.counts[i] <= series.counts[i - 1]);
    }
    CHECK(series.counts.back() == 0);
}

TEST_CASE("absorbing death limit") {
    SimConfig cfg = small_config();
    cfg.horizon_steps = 1500;
    AbmParams p = reference_params();
    p.death_probability = 1.0 - 1e-12;
    p.reinfection_probability = 1e-300;
    p.infection_period = 5.0;
    const EpidemicSeries series = simulate(p, cfg, 11);
    CHECK(series.counts.back() == 0);  // every infection resolved to Dead
}

TEST_CASE("series length and bounds") {
    const SimConfig cfg = small_config();
    const EpidemicSeries series = simulate(reference_params(), cfg, 3);
    REQUIRE(series.counts.size() == cfg.horizon_steps);
    for (std::uint32_t c : series.counts) CHECK(c <= cfg.population_size);
}

TEST_CASE("fully infected population with minimal reinfection is non-increasing") {
    SimConfig cfg = small_config();
    cfg.initial_infected = cfg.population_size;
    cfg.horizon_steps = 600;
    AbmParams p = reference_params();
    p.reinfection_probability = 1e-300;
    const EpidemicSeries series = simulate(p, cfg, 9);
    for (std::size_t i = 1; i < series.counts.size(); ++i) {
        CHECK(series.counts[i] <= series.counts[i - 1]);
    }
}

TEST_CASE("series CSV round-trip") {
    const EpidemicSeries series = simulate(reference_params(), small_config(), 1);
    std::stringstream buf;
    write_series_csv(series, buf);
    const EpidemicSeries back = read_series_csv(buf);
    CHECK(back == series);
}

TEST_CASE("series JSON round-trip") {
    const EpidemicSeries series = simulate(reference_params(), small_config(), 2);
    CHECK(series_from_json(series_to_json(series)) == series);
}

TEST_CASE("csv reader rejects missing header") {
    std::stringstream buf("counts\n1\n2\n");
    CHECK_THROWS_AS(read_series_csv(buf), IoError);
}

#ifndef CALIB_ABM_HPP
#define CALIB_ABM_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace calib {

using ParameterVector = std::vector<double>;

inline constexpr std::size_t kNumParams = 7;

// Calibratable parameters, in canonical order:
//   1 transmission probability (beta)   (0,1)
//   2 reinfection probability           (0,1)
//   3 death probability                 (0,1)
//   4 infection period [days]           (0,41)
//   5 detection time [days]             (0,41)
//   6 speed [unit-space / step]         (0,1)
//   7 interaction radius [unit-space]   (0,1)
struct AbmParams {
    double transmission_probability;
    double reinfection_probability;
    double death_probability;
    double infection_period;
    double detection_time;
    double speed;
    double interaction_radius;

    ParameterVector to_vector() const;
};

struct SimConfig {
    std::size_t population_size = 500;
    std::size_t initial_infected = 5;
    std::size_t horizon_steps = 2000;
    double steps_per_day = 1000.0 / 41.0;  // 41 days == 1000 steps
};

enum class HealthStatus : std::uint8_t { Susceptible, Infected, Recovered, Dead };

struct AgentState {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;
    HealthStatus status = HealthStatus::Susceptible;
    std::int64_t infected_since = -1;  // step index, -1 when not infected
    bool isolated = false;
};

// Per-step infected counts over the simulation horizon.
struct EpidemicSeries {
    std::vector<std::uint32_t> counts;

    bool operator==(const EpidemicSeries&) const = default;
};

// Validates a raw 7-vector against the open parameter intervals.
// Throws WrongArityError / OutOfRangeError (1-based index).
AbmParams validate_params(const ParameterVector& raw);

// round(days * steps_per_day), clamped below at 1.
std::int64_t days_to_steps(double days, double steps_per_day);

// Continuous-space SIR walk on the unit torus. Deterministic in
// (params, cfg, seed); the first k counts of a horizon-n run equal a
// horizon-k run with the same seed.
EpidemicSeries simulate(const AbmParams& params, const SimConfig& cfg,
                        std::uint64_t seed);

// One-column CSV, header "infected". Round-trips exactly.
void write_series_csv(const EpidemicSeries& series, std::ostream& out);
EpidemicSeries read_series_csv(std::istream& in);

// Plain JSON array of counts. Round-trips exactly.
std::string series_to_json(const EpidemicSeries& series);
EpidemicSeries series_from_json(const std::string& text);

}  // namespace calib

#endif

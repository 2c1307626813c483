#include "calib/abm.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "calib/errors.hpp"
#include "calib/rng.hpp"

namespace calib {

namespace {

// Tags for the counter-based RNG streams.
enum Stream : std::uint64_t {
    kInitPosition = 1,
    kHeading = 2,
    kContact = 3,
    kResolve = 4,
};

struct Bounds {
    double low;
    double high;
};

constexpr Bounds kParamBounds[kNumParams] = {
    {0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}, {0.0, 41.0},
    {0.0, 41.0}, {0.0, 1.0}, {0.0, 1.0},
};

double wrap_unit(double v) {
    v -= std::floor(v);
    // floor of a value just below an integer can still round to 1.0
    if (v >= 1.0) v = 0.0;
    return v;
}

double torus_dist2(double ax, double ay, double bx, double by) {
    double dx = std::fabs(ax - bx);
    if (dx > 0.5) dx = 1.0 - dx;
    double dy = std::fabs(ay - by);
    if (dy > 0.5) dy = 1.0 - dy;
    return dx * dx + dy * dy;
}

// Uniform bucket grid with cell edge >= interaction radius, so the 3x3
// neighbourhood of a cell covers every possible contact.
class ContactGrid {
public:
    ContactGrid(double radius, std::size_t n_agents) {
        int cells = static_cast<int>(std::floor(1.0 / radius));
        cells_ = std::clamp(cells, 1, 128);
        head_.assign(static_cast<std::size_t>(cells_) * cells_, -1);
        next_.assign(n_agents, -1);
    }

    void insert(int agent, double x, double y) {
        const std::size_t c = cell_of(x, y);
        next_[static_cast<std::size_t>(agent)] = head_[c];
        head_[c] = agent;
    }

    template <typename Fn>
    void for_neighbors(double x, double y, Fn&& fn) const {
        const int cx = coord(x);
        const int cy = coord(y);
        for (int ox = -1; ox <= 1; ++ox) {
            for (int oy = -1; oy <= 1; ++oy) {
                const int gx = (cx + ox + cells_) % cells_;
                const int gy = (cy + oy + cells_) % cells_;
                for (int a = head_[static_cast<std::size_t>(gx) * cells_ + gy];
                     a != -1; a = next_[static_cast<std::size_t>(a)]) {
                    fn(a);
                }
            }
        }
    }

private:
    int coord(double v) const {
        int c = static_cast<int>(v * cells_);
        return std::clamp(c, 0, cells_ - 1);
    }

    std::size_t cell_of(double x, double y) const {
        return static_cast<std::size_t>(coord(x)) * cells_ + coord(y);
    }

    int cells_;
    std::vector<int> head_;
    std::vector<int> next_;
};

}  // namespace

ParameterVector AbmParams::to_vector() const {
    return {transmission_probability, reinfection_probability, death_probability,
            infection_period, detection_time, speed, interaction_radius};
}

AbmParams validate_params(const ParameterVector& raw) {
    if (raw.size() != kNumParams) {
        throw WrongArityError("expected 7 parameters, got " +
                              std::to_string(raw.size()));
    }
    for (std::size_t i = 0; i < kNumParams; ++i) {
        const auto& b = kParamBounds[i];
        if (!(raw[i] > b.low) || !(raw[i] < b.high)) {
            throw OutOfRangeError(i + 1, "parameter " + std::to_string(i + 1) +
                                             " = " + std::to_string(raw[i]) +
                                             " outside open interval (" +
                                             std::to_string(b.low) + ", " +
                                             std::to_string(b.high) + ")");
        }
    }
    return AbmParams{raw[0], raw[1], raw[2], raw[3], raw[4], raw[5], raw[6]};
}

std::int64_t days_to_steps(double days, double steps_per_day) {
    const auto steps = static_cast<std::int64_t>(std::llround(days * steps_per_day));
    return std::max<std::int64_t>(steps, 1);
}

EpidemicSeries simulate(const AbmParams& params, const SimConfig& cfg,
                        std::uint64_t seed) {
    const std::size_t n = cfg.population_size;
    const std::int64_t detect_steps =
        days_to_steps(params.detection_time, cfg.steps_per_day);
    const std::int64_t resolve_steps =
        days_to_steps(params.infection_period, cfg.steps_per_day);

    std::vector<AgentState> agents(n);
    for (std::size_t i = 0; i < n; ++i) {
        agents[i].x = rng::to_unit(rng::hash4(seed, kInitPosition, i, 0));
        agents[i].y = rng::to_unit(rng::hash4(seed, kInitPosition, i, 1));
        agents[i].heading = 2.0 * std::numbers::pi *
                            rng::to_unit(rng::hash4(seed, kHeading, i, 0));
        if (i < cfg.initial_infected) {
            agents[i].status = HealthStatus::Infected;
            agents[i].infected_since = 0;
        }
    }

    EpidemicSeries series;
    series.counts.reserve(cfg.horizon_steps);

    std::vector<int> pending_infect;
    std::vector<int> contacts;

    for (std::size_t step = 0; step < cfg.horizon_steps; ++step) {
        // 1. Movement: constant random heading per agent, fixed step length,
        // torus wrap. Ballistic (rather than diffusive) motion keeps the
        // per-pair encounter rate high enough for realistic outbreaks at the
        // reference speed and radius; a per-step heading resample is
        // diffusion-limited and stalls the epidemic.
        for (std::size_t i = 0; i < n; ++i) {
            AgentState& a = agents[i];
            if (a.status == HealthStatus::Dead || a.isolated) continue;
            a.x = wrap_unit(a.x + params.speed * std::cos(a.heading));
            a.y = wrap_unit(a.y + params.speed * std::sin(a.heading));
        }

        // 2. Transmission: synchronous, based on post-movement positions and
        // pre-step infection status.
        ContactGrid grid(params.interaction_radius, n);
        for (std::size_t i = 0; i < n; ++i) {
            if (agents[i].status == HealthStatus::Infected) {
                grid.insert(static_cast<int>(i), agents[i].x, agents[i].y);
            }
        }
        const double r2 = params.interaction_radius * params.interaction_radius;
        pending_infect.clear();
        for (std::size_t i = 0; i < n; ++i) {
            const AgentState& a = agents[i];
            if (a.status != HealthStatus::Susceptible &&
                a.status != HealthStatus::Recovered) {
                continue;
            }
            contacts.clear();
            grid.for_neighbors(a.x, a.y, [&](int j) {
                const AgentState& b = agents[static_cast<std::size_t>(j)];
                if (torus_dist2(a.x, a.y, b.x, b.y) <= r2) contacts.push_back(j);
            });
            std::sort(contacts.begin(), contacts.end());
            const double p = a.status == HealthStatus::Susceptible
                                 ? params.transmission_probability
                                 : params.reinfection_probability;
            for (int j : contacts) {
                const double u = rng::to_unit(
                    rng::hash5(seed, kContact, step, i, static_cast<std::uint64_t>(j)));
                if (u < p) {
                    pending_infect.push_back(static_cast<int>(i));
                    break;
                }
            }
        }
        for (int i : pending_infect) {
            AgentState& a = agents[static_cast<std::size_t>(i)];
            a.status = HealthStatus::Infected;
            a.infected_since = static_cast<std::int64_t>(step);
            a.isolated = false;
        }

        // 3. Detection: long-infected agents stop moving but stay infectious.
        // 4. Resolution: death or recovery after the infection period.
        for (std::size_t i = 0; i < n; ++i) {
            AgentState& a = agents[i];
            if (a.status != HealthStatus::Infected) continue;
            const std::int64_t duration =
                static_cast<std::int64_t>(step) - a.infected_since;
            if (duration >= detect_steps) a.isolated = true;
            if (duration >= resolve_steps) {
                const double u = rng::to_unit(rng::hash4(seed, kResolve, step, i));
                a.status = u < params.death_probability ? HealthStatus::Dead
                                                        : HealthStatus::Recovered;
                a.infected_since = -1;
                a.isolated = false;
            }
        }

        std::uint32_t infected = 0;
        for (const AgentState& a : agents) {
            if (a.status == HealthStatus::Infected) ++infected;
        }
        series.counts.push_back(infected);
    }
    return series;
}

void write_series_csv(const EpidemicSeries& series, std::ostream& out) {
    out << "infected\n";
    for (std::uint32_t c : series.counts) out << c << '\n';
}

EpidemicSeries read_series_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "infected") {
        throw IoError("expected CSV header 'infected'");
    }
    EpidemicSeries series;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            std::size_t pos = 0;
            const unsigned long v = std::stoul(line, &pos);
            if (pos != line.size()) throw std::invalid_argument(line);
            series.counts.push_back(static_cast<std::uint32_t>(v));
        } catch (const std::exception&) {
            throw IoError("bad count at line " + std::to_string(lineno) + ": " + line);
        }
    }
    return series;
}

std::string series_to_json(const EpidemicSeries& series) {
    return nlohmann::json(series.counts).dump();
}

EpidemicSeries series_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_array()) throw IoError("expected a JSON array of counts");
    EpidemicSeries series;
    series.counts = j.get<std::vector<std::uint32_t>>();
    return series;
}

}  // namespace calib

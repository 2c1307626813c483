#include "calib/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "calib/errors.hpp"
#include "calib/rng.hpp"

namespace calib {

namespace {

std::vector<std::pair<double, double>> free_ranges(const ParameterRanges& ranges,
                                                   const PinnedCoordinates& pinned) {
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < ranges.arity(); ++i) {
        if (!pinned.is_pinned[i]) out.push_back(ranges.ranges[i]);
    }
    return out;
}

ParameterVector embed(const std::vector<double>& free_values,
                      const PinnedCoordinates& pinned) {
    ParameterVector out(pinned.is_pinned.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = pinned.is_pinned[i] ? pinned.pinned_values[i] : free_values[k++];
    }
    return out;
}

}  // namespace

ParameterRanges ParameterRanges::defaults() {
    return ParameterRanges{{{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}, {0.0, 41.0},
                            {0.0, 41.0}, {0.0, 1.0}, {0.0, 1.0}}};
}

void ParameterRanges::check() const {
    for (std::size_t i = 0; i < ranges.size(); ++i) {
        if (!(ranges[i].first < ranges[i].second)) {
            throw BadRangeError("range " + std::to_string(i + 1) + " has low >= high");
        }
    }
}

PinnedCoordinates PinnedCoordinates::none(std::size_t arity) {
    return PinnedCoordinates{std::vector<bool>(arity, false),
                             ParameterVector(arity, 0.0)};
}

std::size_t PinnedCoordinates::free_count() const {
    return static_cast<std::size_t>(
        std::count(is_pinned.begin(), is_pinned.end(), false));
}

CandidatePool generate_pool_random(std::size_t n, const ParameterRanges& ranges,
                                   const PinnedCoordinates& pinned,
                                   std::uint64_t seed) {
    ranges.check();
    const auto free = free_ranges(ranges, pinned);
    rng::UniformSource source(rng::hash2(seed, 0x9001ULL));

    CandidatePool pool{{}, PoolOrigin::Random};
    pool.vectors.reserve(n);
    std::set<ParameterVector> seen;
    while (pool.vectors.size() < n) {
        std::vector<double> values(free.size());
        for (std::size_t f = 0; f < free.size(); ++f) {
            // Rejection keeps draws strictly inside the open interval.
            double v;
            do {
                v = source.next_in(free[f].first, free[f].second);
            } while (v <= free[f].first || v >= free[f].second);
            values[f] = v;
        }
        ParameterVector candidate = embed(values, pinned);
        if (seen.insert(candidate).second) pool.vectors.push_back(std::move(candidate));
    }
    return pool;
}

CandidatePool generate_pool_sobol(std::size_t n, const ParameterRanges& ranges,
                                  const PinnedCoordinates& pinned,
                                  SobolGenerator& gen) {
    ranges.check();
    const auto free = free_ranges(ranges, pinned);
    if (gen.dimension() != free.size()) {
        throw BadRangeError("sobol dimension does not match free coordinate count");
    }

    CandidatePool pool{{}, PoolOrigin::Sobol};
    pool.vectors.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const ParameterVector scaled = scale_point(gen.next_point(), free);
        pool.vectors.push_back(embed(scaled, pinned));
    }
    return pool;
}

std::vector<ParameterVector> draw_minibatch(CandidatePool& pool,
                                            std::size_t batch_size,
                                            std::uint64_t seed) {
    if (batch_size > pool.vectors.size()) {
        throw PoolExhaustedError("batch of " + std::to_string(batch_size) +
                                 " from pool of " +
                                 std::to_string(pool.vectors.size()));
    }
    rng::UniformSource source(rng::hash2(seed, 0xd4a3ULL));
    std::vector<ParameterVector> batch;
    batch.reserve(batch_size);
    for (std::size_t k = 0; k < batch_size; ++k) {
        const std::size_t pick = source.next_index(pool.vectors.size());
        batch.push_back(std::move(pool.vectors[pick]));
        pool.vectors[pick] = std::move(pool.vectors.back());
        pool.vectors.pop_back();
    }
    return batch;
}

CandidatePool reinitialize_pool_epsilon_greedy(
    const SurrogateClassifier& model, PoolOrigin kind, std::size_t n,
    double epsilon_positive, const ParameterRanges& ranges,
    const PinnedCoordinates& pinned, std::uint64_t seed,
    SobolGenerator* gen, std::size_t pool_oversample) {
    CandidatePool raw =
        kind == PoolOrigin::Sobol
            ? generate_pool_sobol(pool_oversample * n, ranges, pinned, *gen)
            : generate_pool_random(pool_oversample * n, ranges, pinned,
                                   rng::hash2(seed, 0xe9e9ULL));

    std::vector<ParameterVector> positives;
    std::vector<ParameterVector> negatives;
    for (ParameterVector& v : raw.vectors) {
        (model.predict(v) == Label::Positive ? positives : negatives)
            .push_back(std::move(v));
    }

    rng::UniformSource source(rng::hash2(seed, 0xe6e6ULL));
    auto take = [&](std::vector<ParameterVector>& from) {
        const std::size_t pick = source.next_index(from.size());
        ParameterVector v = std::move(from[pick]);
        from[pick] = std::move(from.back());
        from.pop_back();
        return v;
    };

    CandidatePool pool{{}, kind == PoolOrigin::Sobol ? PoolOrigin::SurrogateSobol
                                                     : PoolOrigin::SurrogateRandom};
    pool.vectors.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const bool want_positive = source.next_unit() < epsilon_positive;
        auto& preferred = want_positive ? positives : negatives;
        auto& fallback = want_positive ? negatives : positives;
        pool.vectors.push_back(take(preferred.empty() ? fallback : preferred));
    }
    return pool;
}

}  // namespace calib

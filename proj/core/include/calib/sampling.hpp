#ifndef CALIB_SAMPLING_HPP
#define CALIB_SAMPLING_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "calib/abm.hpp"
#include "calib/sobol.hpp"
#include "calib/surrogate.hpp"

namespace calib {

struct ParameterRanges {
    std::vector<std::pair<double, double>> ranges;

    // (0,1) for probabilities/speed/radius, (0,41) days for periods.
    static ParameterRanges defaults();

    std::size_t arity() const { return ranges.size(); }
    void check() const;  // throws BadRangeError when any low >= high
};

enum class PoolOrigin : std::uint8_t { Random, Sobol, SurrogateRandom, SurrogateSobol };

struct CandidatePool {
    std::vector<ParameterVector> vectors;
    PoolOrigin origin;
};

// Pins a subset of coordinates to fixed values; the remaining coordinates are
// the ones being calibrated. Pool generators sample only free coordinates.
struct PinnedCoordinates {
    std::vector<bool> is_pinned;       // per coordinate
    ParameterVector pinned_values;     // consulted where is_pinned

    static PinnedCoordinates none(std::size_t arity);
    std::size_t free_count() const;
};

CandidatePool generate_pool_random(std::size_t n, const ParameterRanges& ranges,
                                   const PinnedCoordinates& pinned,
                                   std::uint64_t seed);

// Consumes the next n points from gen; gen.dimension() must equal the number
// of free coordinates.
CandidatePool generate_pool_sobol(std::size_t n, const ParameterRanges& ranges,
                                  const PinnedCoordinates& pinned,
                                  SobolGenerator& gen);

// Uniform sample without replacement; drawn vectors are removed from the pool.
std::vector<ParameterVector> draw_minibatch(CandidatePool& pool,
                                            std::size_t batch_size,
                                            std::uint64_t seed);

// Oversampled base pool classified by the surrogate, then refilled slot by
// slot: predicted positives with probability epsilon_positive, predicted
// negatives otherwise. An exhausted set falls back to the other.
CandidatePool reinitialize_pool_epsilon_greedy(
    const SurrogateClassifier& model, PoolOrigin kind, std::size_t n,
    double epsilon_positive, const ParameterRanges& ranges,
    const PinnedCoordinates& pinned, std::uint64_t seed,
    SobolGenerator* gen, std::size_t pool_oversample = 2);

}  // namespace calib

#endif

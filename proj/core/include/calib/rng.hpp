#ifndef CALIB_RNG_HPP
#define CALIB_RNG_HPP

#include <cstdint>
#include <random>

namespace calib::rng {

// Stateless counter-based hashing. Every random decision in a simulation is
// keyed by (seed, step, agent, tag, ...) so runs are reproducible and the
// first k steps of a long run match a short run exactly.

inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    x *= 0xc4ceb9fe1a85ec53ULL;
    x ^= x >> 33;
    return x;
}

inline std::uint64_t combine(std::uint64_t h, std::uint64_t w) {
    return mix64(h + 0x9e3779b97f4a7c15ULL + w);
}

inline std::uint64_t hash2(std::uint64_t a, std::uint64_t b) {
    return combine(combine(0, a), b);
}

inline std::uint64_t hash3(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return combine(hash2(a, b), c);
}

inline std::uint64_t hash4(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                           std::uint64_t d) {
    return combine(hash3(a, b, c), d);
}

inline std::uint64_t hash5(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                           std::uint64_t d, std::uint64_t e) {
    return combine(hash4(a, b, c, d), e);
}

// Uniform double in [0,1) from 53 high bits.
inline double to_unit(std::uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Seeded stream of uniform doubles. Avoids std::uniform_real_distribution so
// streams are identical across standard libraries.
class UniformSource {
public:
    explicit UniformSource(std::uint64_t seed) : engine_(seed) {}

    double next_unit() { return to_unit(engine_()); }

    double next_in(double low, double high) {
        return low + next_unit() * (high - low);
    }

    // Uniform integer in [0, n), n >= 1. Modulo bias is negligible at 64 bits.
    std::uint64_t next_index(std::uint64_t n) { return engine_() % n; }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace calib::rng

#endif

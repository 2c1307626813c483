#include "calib/sobol.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "calib/errors.hpp"

namespace calib {

namespace {

constexpr int kBits = 32;

struct JoeKuoEntry {
    std::uint32_t s;                // polynomial degree
    std::uint32_t a;                // polynomial coefficients (interior bits)
    std::uint32_t m[8];             // initial direction integers, m[0..s-1]
};

// new-joe-kuo-6 table, dimensions 2..10 (dimension 1 is van der Corput).
constexpr JoeKuoEntry kJoeKuo[] = {
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
};

std::vector<std::uint32_t> build_direction(std::size_t dim) {
    std::vector<std::uint32_t> v(kBits);
    if (dim == 0) {
        for (int k = 0; k < kBits; ++k) {
            v[static_cast<std::size_t>(k)] = 1u << (kBits - 1 - k);
        }
        return v;
    }
    const JoeKuoEntry& e = kJoeKuo[dim - 1];
    const auto s = static_cast<int>(e.s);
    for (int k = 0; k < s; ++k) {
        v[static_cast<std::size_t>(k)] = e.m[k] << (kBits - 1 - k);
    }
    for (int k = s; k < kBits; ++k) {
        std::uint32_t vk = v[static_cast<std::size_t>(k - s)] ^
                           (v[static_cast<std::size_t>(k - s)] >> s);
        for (int i = 1; i < s; ++i) {
            if ((e.a >> (s - 1 - i)) & 1u) vk ^= v[static_cast<std::size_t>(k - i)];
        }
        v[static_cast<std::size_t>(k)] = vk;
    }
    return v;
}

}  // namespace

SobolGenerator::SobolGenerator(std::size_t dimension) : dimension_(dimension) {
    if (dimension < 1 || dimension > kMaxDimension) {
        throw UnsupportedDimensionError("sobol dimension out of range: " +
                                        std::to_string(dimension));
    }
    direction_.reserve(dimension);
    for (std::size_t d = 0; d < dimension; ++d) {
        direction_.push_back(build_direction(d));
    }
    state_.assign(dimension, 0);
}

std::vector<double> SobolGenerator::next_point() {
    if (index_ >= 0xFFFFFFFFull) throw IndexOverflowError();
    // Gray-code step: flip the direction number at the lowest zero bit of the
    // running index. Advancing from 0 to 1 first skips the all-zero point.
    const auto c = static_cast<unsigned>(
        std::countr_one(static_cast<std::uint32_t>(index_)));
    ++index_;
    std::vector<double> point(dimension_);
    for (std::size_t d = 0; d < dimension_; ++d) {
        state_[d] ^= direction_[d][c];
        point[d] = static_cast<double>(state_[d]) * 0x1.0p-32;
    }
    return point;
}

ParameterVector scale_point(const std::vector<double>& unit_point,
                            const std::vector<std::pair<double, double>>& ranges) {
    if (unit_point.size() != ranges.size()) {
        throw BadRangeError("ranges arity does not match point dimension");
    }
    ParameterVector out(unit_point.size());
    for (std::size_t i = 0; i < unit_point.size(); ++i) {
        const auto [low, high] = ranges[i];
        if (!(low < high)) {
            throw BadRangeError("range " + std::to_string(i + 1) + " has low >= high");
        }
        double v = low + unit_point[i] * (high - low);
        if (v <= low) v = std::nextafter(low, high);
        if (v >= high) v = std::nextafter(high, low);
        out[i] = v;
    }
    return out;
}

}  // namespace calib

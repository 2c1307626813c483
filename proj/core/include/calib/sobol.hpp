#ifndef CALIB_SOBOL_HPP
#define CALIB_SOBOL_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "calib/abm.hpp"

namespace calib {

// 32-bit Sobol low-discrepancy sequence using the Joe-Kuo direction numbers,
// dimensions 1..10. The zero point at index 0 is skipped so no emitted point
// sits on an open-interval boundary.
class SobolGenerator {
public:
    static constexpr std::size_t kMaxDimension = 10;

    explicit SobolGenerator(std::size_t dimension);

    std::size_t dimension() const { return dimension_; }
    std::uint64_t index() const { return index_; }

    // Next point in [0,1)^d via the Gray-code XOR recurrence.
    std::vector<double> next_point();

private:
    std::size_t dimension_;
    std::uint64_t index_ = 0;  // points emitted so far
    std::vector<std::vector<std::uint32_t>> direction_;  // [dim][bit]
    std::vector<std::uint32_t> state_;
};

// Affine map of a unit point into parameter ranges. Outputs landing exactly on
// a boundary are nudged to the nearest representable interior value.
ParameterVector scale_point(const std::vector<double>& unit_point,
                            const std::vector<std::pair<double, double>>& ranges);

}  // namespace calib

#endif

#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <vector>

#include "calib/errors.hpp"
#include "calib/rng.hpp"
#include "calib/sobol.hpp"

using namespace calib;

namespace {

// Independent oracle: evaluates the sequence directly from the published
// initial direction integers, without the incremental Gray-code state. The
// n-th Gray-code-ordered point equals the natural-order point gray(n).
struct OracleDim {
    unsigned s;
    std::uint32_t a;
    std::uint32_t m[8];
};

const OracleDim kOracle[7] = {
    {0, 0, {0}},  // van der Corput
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
};

std::vector<std::uint32_t> oracle_directions(const OracleDim& dim) {
    std::vector<std::uint32_t> v(32);
    if (dim.s == 0) {
        for (unsigned k = 0; k < 32; ++k) v[k] = 1u << (31 - k);
        return v;
    }
    for (unsigned k = 0; k < dim.s; ++k) v[k] = dim.m[k] << (31 - k);
    for (unsigned k = dim.s; k < 32; ++k) {
        std::uint32_t vk = v[k - dim.s] ^ (v[k - dim.s] >> dim.s);
        for (unsigned i = 1; i < dim.s; ++i) {
            if ((dim.a >> (dim.s - 1 - i)) & 1u) vk ^= v[k - i];
        }
        v[k] = vk;
    }
    return v;
}

double oracle_point(const std::vector<std::uint32_t>& v, std::uint32_t n) {
    const std::uint32_t g = n ^ (n >> 1);
    std::uint32_t acc = 0;
    for (unsigned bit = 0; bit < 32; ++bit) {
        if ((g >> bit) & 1u) acc ^= v[bit];
    }
    return static_cast<double>(acc) * 0x1.0p-32;
}

double star_discrepancy_grid(const std::vector<std::pair<double, double>>& points,
                             int grid) {
    double worst = 0.0;
    for (int gx = 1; gx <= grid; ++gx) {
        for (int gy = 1; gy <= grid; ++gy) {
            const double x = static_cast<double>(gx) / grid;
            const double y = static_cast<double>(gy) / grid;
            std::size_t inside = 0;
            for (const auto& [px, py] : points) {
                if (px < x && py < y) ++inside;
            }
            const double frac =
                static_cast<double>(inside) / static_cast<double>(points.size());
            worst = std::max(worst, std::abs(frac - x * y));
        }
    }
    return worst;
}

}  // namespace

TEST_CASE("construction limits") {
    CHECK_THROWS_AS(SobolGenerator(0), UnsupportedDimensionError);
    CHECK_THROWS_AS(SobolGenerator(SobolGenerator::kMaxDimension + 1),
                    UnsupportedDimensionError);
    CHECK(SobolGenerator(7).dimension() == 7);
}

TEST_CASE("first 1-D points") {
    SobolGenerator gen(1);
    const double expected[] = {0.5, 0.75, 0.25, 0.375, 0.875};
    for (double e : expected) {
        CHECK(gen.next_point()[0] == e);
    }
}

TEST_CASE("first 2-D point is the centre") {
    SobolGenerator gen(2);
    const auto p = gen.next_point();
    CHECK(p[0] == 0.5);
    CHECK(p[1] == 0.5);
}

TEST_CASE("stream matches the direct-evaluation oracle for all 7 dimensions") {
    SobolGenerator gen(7);
    std::vector<std::vector<std::uint32_t>> directions;
    for (const OracleDim& d : kOracle) directions.push_back(oracle_directions(d));
    for (std::uint32_t n = 1; n <= 256; ++n) {
        const auto p = gen.next_point();
        for (std::size_t d = 0; d < 7; ++d) {
            CHECK(p[d] == oracle_point(directions[d], n));
        }
    }
}

TEST_CASE("points stay in [0,1) and generators of equal dimension agree") {
    SobolGenerator a(7);
    SobolGenerator b(7);
    for (int k = 0; k < 1000; ++k) {
        const auto pa = a.next_point();
        const auto pb = b.next_point();
        CHECK(pa == pb);
        for (double v : pa) {
            CHECK(v >= 0.0);
            CHECK(v < 1.0);
        }
    }
}

TEST_CASE("dyadic stratification of the 1-D sequence for k <= 6") {
    // The underlying sequence starts with the (skipped) zero point; the first
    // 2^k sequence elements are that zero point plus the first 2^k - 1
    // emitted points.
    for (unsigned k = 1; k <= 6; ++k) {
        const std::size_t bins = 1u << k;
        std::vector<int> histogram(bins, 0);
        histogram[0] = 1;  // the implicit zero point
        SobolGenerator gen(1);
        for (std::size_t i = 0; i + 1 < bins; ++i) {
            const double v = gen.next_point()[0];
            ++histogram[static_cast<std::size_t>(v * static_cast<double>(bins))];
        }
        for (int count : histogram) CHECK(count == 1);
    }
}

TEST_CASE("2-D star discrepancy beats the median of 50 uniform batches") {
    SobolGenerator gen(2);
    std::vector<std::pair<double, double>> sobol_points;
    for (int i = 0; i < 256; ++i) {
        const auto p = gen.next_point();
        sobol_points.emplace_back(p[0], p[1]);
    }
    const double sobol_disc = star_discrepancy_grid(sobol_points, 64);

    std::vector<double> random_discs;
    for (std::uint64_t batch = 0; batch < 50; ++batch) {
        rng::UniformSource source(rng::hash2(0xd15c, batch));
        std::vector<std::pair<double, double>> pts;
        for (int i = 0; i < 256; ++i) {
            pts.emplace_back(source.next_unit(), source.next_unit());
        }
        random_discs.push_back(star_discrepancy_grid(pts, 64));
    }
    std::sort(random_discs.begin(), random_discs.end());
    const double median = random_discs[25];
    CHECK(sobol_disc < median);
}

TEST_CASE("scale_point") {
    CHECK(scale_point({0.5}, {{0.0, 41.0}})[0] == 20.5);
    CHECK(scale_point({0.75}, {{0.0, 1.0}})[0] == 0.75);

    const ParameterVector nudged = scale_point({0.0, 0.0}, {{0.0, 1.0}, {0.0, 41.0}});
    CHECK(nudged[0] > 0.0);
    CHECK(nudged[1] > 0.0);

    CHECK_THROWS_AS(scale_point({0.5}, {{1.0, 1.0}}), BadRangeError);
    CHECK_THROWS_AS(scale_point({0.5, 0.5}, {{0.0, 1.0}}), BadRangeError);
}

#include "calib/ks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "calib/errors.hpp"

namespace calib {

TimeSeriesCdf to_cdf(const EpidemicSeries& series) {
    std::uint64_t total = 0;
    for (std::uint32_t c : series.counts) total += c;
    if (total == 0) throw AllZeroSeriesError();

    TimeSeriesCdf cdf;
    cdf.values.reserve(series.counts.size());
    std::uint64_t running = 0;
    for (std::uint32_t c : series.counts) {
        running += c;
        cdf.values.push_back(static_cast<double>(running) /
                             static_cast<double>(total));
    }
    return cdf;
}

double ks_statistic(const EpidemicSeries& real_series,
                    const EpidemicSeries& sim_series) {
    if (real_series.counts.size() != sim_series.counts.size()) {
        throw LengthMismatchError("series lengths differ");
    }
    const TimeSeriesCdf fr = to_cdf(real_series);
    const TimeSeriesCdf fs = to_cdf(sim_series);
    double sup = 0.0;
    for (std::size_t i = 0; i < fr.values.size(); ++i) {
        sup = std::max(sup, std::fabs(fr.values[i] - fs.values[i]));
    }
    return sup;
}

double ks_critical_value(double alpha, std::size_t n, std::size_t m) {
    // c(alpha) from the standard two-sample KS table.
    if (alpha != 0.01) {
        throw UnsupportedAlphaError("alpha not tabulated: " + std::to_string(alpha));
    }
    const double c = 1.628;
    return c * std::sqrt(static_cast<double>(n + m) /
                         (static_cast<double>(n) * static_cast<double>(m)));
}

KsOutcome evaluate_candidate(const EpidemicSeries& real_series,
                             const EpidemicSeries& sim_series, double alpha) {
    const double critical =
        ks_critical_value(alpha, real_series.counts.size(), real_series.counts.size());
    bool sim_all_zero = true;
    for (std::uint32_t c : sim_series.counts) {
        if (c != 0) {
            sim_all_zero = false;
            break;
        }
    }
    if (sim_all_zero) {
        // Dead parameter region: maximally dissimilar by convention.
        return KsOutcome{1.0, Label::Negative, critical};
    }
    const double d = ks_statistic(real_series, sim_series);
    return KsOutcome{d, d <= critical ? Label::Positive : Label::Negative, critical};
}

}  // namespace calib

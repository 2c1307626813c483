#ifndef CALIB_KS_HPP
#define CALIB_KS_HPP

#include <vector>

#include "calib/abm.hpp"

namespace calib {

enum class Label : std::uint8_t { Positive, Negative };

// Time series rendered as an empirical CDF: non-decreasing, last value 1.
struct TimeSeriesCdf {
    std::vector<double> values;
};

struct KsOutcome {
    double statistic;
    Label label;
    double critical_value;
};

// Cumulative sum scaled by total mass. Throws AllZeroSeriesError when every
// count is zero.
TimeSeriesCdf to_cdf(const EpidemicSeries& series);

// sup_i |F_R(i) - F_S(i)| over the shared step grid.
double ks_statistic(const EpidemicSeries& real_series,
                    const EpidemicSeries& sim_series);

// Two-sample large-sample critical value c(alpha) * sqrt((n+m)/(n*m)).
// Only alpha = 0.01 is tabulated (c = 1.628).
double ks_critical_value(double alpha, std::size_t n, std::size_t m);

// KS statistic plus the 99% critical-value labeling rule. An all-zero
// simulated series yields {1.0, Negative} instead of an error.
KsOutcome evaluate_candidate(const EpidemicSeries& real_series,
                             const EpidemicSeries& sim_series, double alpha);

}  // namespace calib

#endif

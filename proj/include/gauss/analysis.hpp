#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gauss {

/// Per-round accuracy differences between a strategy and the random baseline.
struct DifferenceCurve {
    std::vector<double> values;
    std::string strategy;
};

/// Histogram over integer scores with contiguous bins from 0 to max(score).
struct IntHistogram {
    std::vector<std::int64_t> counts;
    std::int64_t total = 0;
};

struct TTestReport {
    double t = 0.0;
    double degrees_of_freedom = 0.0;
    double p_value = 1.0;
    bool significant_at_0p05 = false;
};

DifferenceCurve difference_curve(std::span<const double> strategy_curve,
                                 std::span<const double> random_curve,
                                 std::string strategy_tag);

/// Rectangle-rule sum of per-round differences (unit round spacing).
double area_under_difference(std::span<const double> strategy_curve,
                             std::span<const double> random_curve);

/// Multi-seed variant: both sides are averaged per round first.
double area_under_difference(const std::vector<std::vector<double>>& strategy_curves,
                             const std::vector<std::vector<double>>& random_curves);

IntHistogram importance_histogram(std::span<const std::int64_t> scores);

/**
 * KL(p || q) after both histograms are padded to a common bin range,
 * normalized, convolved with a discrete Gaussian kernel (sigma in bins,
 * truncated at +-4 sigma and renormalized), floored at 1e-12 and
 * renormalized again.
 */
double smoothed_kl(const IntHistogram& p, const IntHistogram& q, double sigma);

/// Two-sided Welch t-test (unequal variances, Welch-Satterthwaite dof).
TTestReport welch_t_test(std::span<const double> sample_a, std::span<const double> sample_b);

/// Per-round mean and unbiased standard deviation over same-length curves.
/// A single curve yields zero spread by convention.
struct CurveStats {
    std::vector<double> mean;
    std::vector<double> stddev;
};
CurveStats curve_mean_and_spread(const std::vector<std::vector<double>>& curves);

}  // namespace gauss

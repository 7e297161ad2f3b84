#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace gauss {

/// Two-component univariate Gaussian mixture. Component F is canonically the
/// one with the larger mean after fitting.
struct Gmm1D {
    double weight_u = 0.5;
    double weight_f = 0.5;
    double mean_u = 0.0;
    double mean_f = 0.0;
    double std_u = 1.0;
    double std_f = 1.0;
};

struct EmConfig {
    std::size_t max_iterations = 200;
    double relative_tolerance = 1e-8;
    double variance_floor = 1e-6;
};

/// Fit outcome. A degenerate fit (zero overall variance, or a component
/// starved below 1/n weight) is a first-class result, not an error: callers
/// use it as a fallback trigger.
struct GmmFit {
    std::optional<Gmm1D> model;
    std::size_t iterations = 0;
    double final_log_likelihood = 0.0;

    bool degenerate() const { return !model.has_value(); }
};

/**
 * Expectation-maximization for the two-component mixture.
 *
 * Initialization is deterministic: means at the 25th/75th percentiles, equal
 * weights, both variances at the (floored) overall sample variance. Values
 * are sorted internally, so the fit is invariant under input permutation.
 * The seed parameter is part of the call contract but unused by the
 * quantile initializer.
 *
 * When ll_trace is non-null the per-iteration log-likelihood is appended to
 * it (one entry per E-step).
 */
GmmFit fit_em(std::span<const double> values, const EmConfig& config = {},
              std::uint64_t seed = 0, std::vector<double>* ll_trace = nullptr);

/// Sum over values of the log mixture density, evaluated in log-space.
double log_likelihood(const Gmm1D& gmm, std::span<const double> values);

/// Posterior component probabilities (r_u, r_f) for one value; r_u + r_f = 1.
std::pair<double, double> responsibilities(const Gmm1D& gmm, double value);

/// r_f for every value (the GauSS sampling weight).
std::vector<double> responsibilities_f(const Gmm1D& gmm, std::span<const double> values);

}  // namespace gauss

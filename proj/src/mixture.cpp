#include "gauss/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gauss {

namespace {

double log_normal_pdf(double x, double mean, double variance) {
    const double d = x - mean;
    return -0.5 * std::log(2.0 * std::numbers::pi * variance) - d * d / (2.0 * variance);
}

// Linear-interpolated percentile of a sorted vector, q in [0,1].
double percentile_sorted(const std::vector<double>& sorted, double q) {
    const double pos = q * double(sorted.size() - 1);
    const std::size_t lo = std::size_t(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - double(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

GmmFit fit_em(std::span<const double> values, const EmConfig& config,
              std::uint64_t /*seed*/, std::vector<double>* ll_trace) {
    if (values.size() < 2) {
        throw std::invalid_argument("fit_em: need at least 2 values");
    }
    const std::size_t n = values.size();

    std::vector<double> x(values.begin(), values.end());
    std::sort(x.begin(), x.end());

    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= double(n);
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= double(n);

    GmmFit fit;
    if (var < config.variance_floor) return fit;  // all values effectively equal

    double mu_u = percentile_sorted(x, 0.25);
    double mu_f = percentile_sorted(x, 0.75);
    if (mu_u == mu_f) {
        // Heavily tied data can collapse the quantiles; spread to the extremes.
        mu_u = x.front();
        mu_f = x.back();
    }
    double var_u = std::max(var, config.variance_floor);
    double var_f = var_u;
    double w_u = 0.5;
    double w_f = 0.5;

    std::vector<double> r_f(n);
    double ll_prev = 0.0;
    bool have_prev = false;
    double ll = 0.0;

    for (std::size_t it = 1; it <= config.max_iterations; ++it) {
        // E-step in log-space.
        ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double au = std::log(w_u) + log_normal_pdf(x[i], mu_u, var_u);
            const double af = std::log(w_f) + log_normal_pdf(x[i], mu_f, var_f);
            const double m = std::max(au, af);
            const double eu = std::exp(au - m);
            const double ef = std::exp(af - m);
            r_f[i] = ef / (eu + ef);
            ll += m + std::log(eu + ef);
        }
        if (ll_trace != nullptr) ll_trace->push_back(ll);
        fit.iterations = it;

        // M-step with variance flooring.
        double nf = 0.0;
        for (double r : r_f) nf += r;
        const double nu = double(n) - nf;
        w_u = nu / double(n);
        w_f = nf / double(n);
        if (w_u < 1.0 / double(n) || w_f < 1.0 / double(n)) {
            fit.model.reset();
            fit.final_log_likelihood = ll;
            return fit;  // component starved: degenerate
        }
        double su = 0.0;
        double sf = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            su += (1.0 - r_f[i]) * x[i];
            sf += r_f[i] * x[i];
        }
        mu_u = su / nu;
        mu_f = sf / nf;
        double vu = 0.0;
        double vf = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double du = x[i] - mu_u;
            const double df = x[i] - mu_f;
            vu += (1.0 - r_f[i]) * du * du;
            vf += r_f[i] * df * df;
        }
        var_u = std::max(vu / nu, config.variance_floor);
        var_f = std::max(vf / nf, config.variance_floor);

        if (have_prev &&
            std::abs(ll - ll_prev) < config.relative_tolerance * std::max(1.0, std::abs(ll_prev))) {
            break;
        }
        ll_prev = ll;
        have_prev = true;
    }

    Gmm1D gmm;
    gmm.weight_u = w_u;
    gmm.weight_f = w_f;
    gmm.mean_u = mu_u;
    gmm.mean_f = mu_f;
    gmm.std_u = std::sqrt(var_u);
    gmm.std_f = std::sqrt(var_f);
    if (gmm.mean_u > gmm.mean_f) {
        std::swap(gmm.weight_u, gmm.weight_f);
        std::swap(gmm.mean_u, gmm.mean_f);
        std::swap(gmm.std_u, gmm.std_f);
    }
    fit.model = gmm;
    fit.final_log_likelihood = log_likelihood(gmm, x);
    return fit;
}

double log_likelihood(const Gmm1D& gmm, std::span<const double> values) {
    double ll = 0.0;
    for (double v : values) {
        const double au = std::log(gmm.weight_u) + log_normal_pdf(v, gmm.mean_u, gmm.std_u * gmm.std_u);
        const double af = std::log(gmm.weight_f) + log_normal_pdf(v, gmm.mean_f, gmm.std_f * gmm.std_f);
        const double m = std::max(au, af);
        ll += m + std::log(std::exp(au - m) + std::exp(af - m));
    }
    return ll;
}

std::pair<double, double> responsibilities(const Gmm1D& gmm, double value) {
    const double au = std::log(gmm.weight_u) + log_normal_pdf(value, gmm.mean_u, gmm.std_u * gmm.std_u);
    const double af = std::log(gmm.weight_f) + log_normal_pdf(value, gmm.mean_f, gmm.std_f * gmm.std_f);
    const double m = std::max(au, af);
    const double eu = std::exp(au - m);
    const double ef = std::exp(af - m);
    const double rf = ef / (eu + ef);
    return {1.0 - rf, rf};
}

std::vector<double> responsibilities_f(const Gmm1D& gmm, std::span<const double> values) {
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        out[i] = responsibilities(gmm, values[i]).second;
    }
    return out;
}

}  // namespace gauss

#include "gauss/analysis.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gauss {

namespace {

std::vector<double> mean_per_round(const std::vector<std::vector<double>>& curves) {
    if (curves.empty()) throw std::invalid_argument("mean_per_round: no curves");
    const std::size_t len = curves.front().size();
    for (const auto& c : curves) {
        if (c.size() != len) throw std::invalid_argument("mean_per_round: length mismatch");
    }
    std::vector<double> mean(len, 0.0);
    for (const auto& c : curves) {
        for (std::size_t r = 0; r < len; ++r) mean[r] += c[r];
    }
    for (double& m : mean) m /= double(curves.size());
    return mean;
}

std::vector<double> normalize(std::span<const std::int64_t> counts, std::size_t bins) {
    std::vector<double> out(bins, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        out[i] = double(counts[i]);
        total += out[i];
    }
    if (total <= 0.0) throw std::invalid_argument("smoothed_kl: empty histogram");
    for (double& v : out) v /= total;
    return out;
}

std::vector<double> gaussian_smooth(const std::vector<double>& p, double sigma) {
    const int half = int(std::ceil(4.0 * sigma));
    std::vector<double> kernel(2 * half + 1);
    double ksum = 0.0;
    for (int j = -half; j <= half; ++j) {
        kernel[j + half] = std::exp(-double(j) * double(j) / (2.0 * sigma * sigma));
        ksum += kernel[j + half];
    }
    for (double& k : kernel) k /= ksum;

    const int n = int(p.size());
    std::vector<double> out(p.size(), 0.0);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = -half; j <= half; ++j) {
            const int src = i + j;
            if (src >= 0 && src < n) acc += p[src] * kernel[j + half];
        }
        out[i] = acc;
    }
    double total = 0.0;
    for (double& v : out) {
        v = std::max(v, 1e-12);
        total += v;
    }
    for (double& v : out) v /= total;
    return out;
}

}  // namespace

DifferenceCurve difference_curve(std::span<const double> strategy_curve,
                                 std::span<const double> random_curve,
                                 std::string strategy_tag) {
    if (strategy_curve.size() != random_curve.size()) {
        throw std::invalid_argument("difference_curve: curve length mismatch");
    }
    DifferenceCurve out;
    out.strategy = std::move(strategy_tag);
    out.values.resize(strategy_curve.size());
    for (std::size_t r = 0; r < strategy_curve.size(); ++r) {
        out.values[r] = strategy_curve[r] - random_curve[r];
    }
    return out;
}

double area_under_difference(std::span<const double> strategy_curve,
                             std::span<const double> random_curve) {
    if (strategy_curve.size() != random_curve.size()) {
        throw std::invalid_argument("area_under_difference: curve length mismatch");
    }
    double area = 0.0;
    for (std::size_t r = 0; r < strategy_curve.size(); ++r) {
        area += strategy_curve[r] - random_curve[r];
    }
    return area;
}

double area_under_difference(const std::vector<std::vector<double>>& strategy_curves,
                             const std::vector<std::vector<double>>& random_curves) {
    return area_under_difference(mean_per_round(strategy_curves),
                                 mean_per_round(random_curves));
}

IntHistogram importance_histogram(std::span<const std::int64_t> scores) {
    if (scores.empty()) throw std::invalid_argument("importance_histogram: no scores");
    std::int64_t max_score = 0;
    for (std::int64_t s : scores) {
        if (s < 0) throw std::invalid_argument("importance_histogram: negative score");
        max_score = std::max(max_score, s);
    }
    IntHistogram hist;
    hist.counts.assign(std::size_t(max_score) + 1, 0);
    for (std::int64_t s : scores) ++hist.counts[std::size_t(s)];
    hist.total = std::int64_t(scores.size());
    return hist;
}

double smoothed_kl(const IntHistogram& p, const IntHistogram& q, double sigma) {
    if (sigma <= 0.0) throw std::invalid_argument("smoothed_kl: sigma must be positive");
    const std::size_t bins = std::max(p.counts.size(), q.counts.size());
    const auto ps = gaussian_smooth(normalize(p.counts, bins), sigma);
    const auto qs = gaussian_smooth(normalize(q.counts, bins), sigma);
    double kl = 0.0;
    for (std::size_t i = 0; i < bins; ++i) {
        kl += ps[i] * std::log(ps[i] / qs[i]);
    }
    return kl;
}

TTestReport welch_t_test(std::span<const double> sample_a, std::span<const double> sample_b) {
    const std::size_t na = sample_a.size();
    const std::size_t nb = sample_b.size();
    if (na < 2 || nb < 2) {
        throw std::invalid_argument("welch_t_test: each sample needs >=2 values");
    }
    auto mean_of = [](std::span<const double> s) {
        double m = 0.0;
        for (double v : s) m += v;
        return m / double(s.size());
    };
    auto var_of = [](std::span<const double> s, double m) {
        double v = 0.0;
        for (double x : s) v += (x - m) * (x - m);
        return v / double(s.size() - 1);
    };
    const double ma = mean_of(sample_a);
    const double mb = mean_of(sample_b);
    const double va = var_of(sample_a, ma);
    const double vb = var_of(sample_b, mb);
    const double sa = va / double(na);
    const double sb = vb / double(nb);
    const double se2 = sa + sb;

    TTestReport report;
    if (se2 == 0.0) {
        // Both samples constant: equal means give the null result exactly.
        report.t = ma == mb ? 0.0 : (ma < mb ? -std::numeric_limits<double>::infinity()
                                             : std::numeric_limits<double>::infinity());
        report.degrees_of_freedom = double(na + nb - 2);
        report.p_value = ma == mb ? 1.0 : 0.0;
        report.significant_at_0p05 = report.p_value < 0.05;
        return report;
    }

    report.t = (ma - mb) / std::sqrt(se2);
    report.degrees_of_freedom =
        se2 * se2 / (sa * sa / double(na - 1) + sb * sb / double(nb - 1));
    boost::math::students_t dist(report.degrees_of_freedom);
    report.p_value = 2.0 * boost::math::cdf(dist, -std::abs(report.t));
    report.significant_at_0p05 = report.p_value < 0.05;
    return report;
}

CurveStats curve_mean_and_spread(const std::vector<std::vector<double>>& curves) {
    CurveStats stats;
    stats.mean = mean_per_round(curves);
    stats.stddev.assign(stats.mean.size(), 0.0);
    if (curves.size() < 2) return stats;  // single curve: zero spread by convention
    for (std::size_t r = 0; r < stats.mean.size(); ++r) {
        double acc = 0.0;
        for (const auto& c : curves) {
            acc += (c[r] - stats.mean[r]) * (c[r] - stats.mean[r]);
        }
        stats.stddev[r] = std::sqrt(acc / double(curves.size() - 1));
    }
    return stats;
}

}  // namespace gauss

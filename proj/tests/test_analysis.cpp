#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>
#include <vector>

#include "gauss/analysis.hpp"

using namespace gauss;

TEST_CASE("area under difference arithmetic") {
    const std::vector<double> strat = {0.5, 0.6, 0.7};
    const std::vector<double> rand = {0.5, 0.5, 0.5};

    // hand sum, accumulated the same way the operation defines it
    double expected = 0.0;
    for (std::size_t r = 0; r < strat.size(); ++r) expected += strat[r] - rand[r];

    CHECK(area_under_difference(strat, rand) == expected);
    CHECK(area_under_difference(strat, rand) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(area_under_difference(strat, strat) == 0.0);
    CHECK_THROWS_AS(area_under_difference(strat, std::vector<double>{0.5}),
                    std::invalid_argument);
}

TEST_CASE("area is antisymmetric") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> a(8);
        std::vector<double> b(8);
        for (double& v : a) v = dist(rng);
        for (double& v : b) v = dist(rng);
        REQUIRE(area_under_difference(a, b) ==
                doctest::Approx(-area_under_difference(b, a)).epsilon(1e-12));
    }
}

TEST_CASE("multi-seed area averages per round first") {
    const std::vector<std::vector<double>> strat = {{0.6, 0.8}, {0.4, 0.6}};  // mean .5,.7
    const std::vector<std::vector<double>> rand = {{0.5, 0.5}, {0.5, 0.5}};
    CHECK(area_under_difference(strat, rand) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("difference curve carries the tag") {
    const DifferenceCurve d =
        difference_curve(std::vector<double>{0.6, 0.7}, std::vector<double>{0.5, 0.5}, "gauss");
    CHECK(d.strategy == "gauss");
    CHECK(d.values[0] == doctest::Approx(0.1));
    CHECK(d.values[1] == doctest::Approx(0.2));
}

TEST_CASE("importance histogram bins") {
    const IntHistogram h = importance_histogram(std::vector<std::int64_t>{0, 0, 1, 3});
    CHECK(h.counts == std::vector<std::int64_t>{2, 1, 0, 1});
    CHECK(h.total == 4);

    const IntHistogram zeros = importance_histogram(std::vector<std::int64_t>{0, 0, 0});
    CHECK(zeros.counts == std::vector<std::int64_t>{3});

    std::int64_t sum = 0;
    for (auto c : h.counts) sum += c;
    CHECK(sum == h.total);

    CHECK_THROWS_AS(importance_histogram(std::vector<std::int64_t>{}), std::invalid_argument);
}

TEST_CASE("smoothed KL divergence") {
    const IntHistogram p{{1, 0}, 1};
    const IntHistogram q{{0, 1}, 1};

    SUBCASE("self divergence vanishes") {
        const IntHistogram h{{3, 1, 2}, 6};
        CHECK(std::abs(smoothed_kl(h, h, 1.0)) <= 1e-12);
        CHECK(std::abs(smoothed_kl(h, h, 0.3)) <= 1e-12);
    }
    SUBCASE("reference value from the independent pipeline") {
        // frozen from a hand-rolled numpy convolution + KL evaluation
        CHECK(smoothed_kl(p, q, 0.5) == doctest::Approx(1.523188311912).epsilon(1e-9));
    }
    SUBCASE("heavy smoothing drives KL toward zero") {
        CHECK(smoothed_kl(p, q, 50.0) < 1e-3);
        CHECK(smoothed_kl(p, q, 50.0) < smoothed_kl(p, q, 0.5));
    }
    SUBCASE("non-negativity on random histograms") {
        std::mt19937_64 rng(6);
        std::uniform_int_distribution<std::int64_t> count(0, 20);
        for (int trial = 0; trial < 50; ++trial) {
            IntHistogram a;
            IntHistogram b;
            for (int i = 0; i < 6; ++i) {
                a.counts.push_back(count(rng));
                b.counts.push_back(count(rng));
            }
            a.counts[0] += 1;  // keep totals positive
            b.counts[0] += 1;
            REQUIRE(smoothed_kl(a, b, 1.0) >= -1e-12);
        }
    }
    SUBCASE("histograms of different lengths are padded") {
        const IntHistogram wide{{1, 2, 3, 4}, 10};
        const IntHistogram narrow{{5, 5}, 10};
        CHECK(std::isfinite(smoothed_kl(wide, narrow, 1.0)));
        CHECK(std::isfinite(smoothed_kl(narrow, wide, 1.0)));
    }
    SUBCASE("sigma must be positive") {
        CHECK_THROWS_AS(smoothed_kl(p, q, 0.0), std::invalid_argument);
    }
}

TEST_CASE("welch t test") {
    SUBCASE("textbook threes versus sixes") {
        const TTestReport rep =
            welch_t_test(std::vector<double>{1, 2, 3}, std::vector<double>{4, 5, 6});
        CHECK(rep.t == doctest::Approx(-3.6742346142).epsilon(1e-6));
        CHECK(rep.degrees_of_freedom == doctest::Approx(4.0).epsilon(1e-9));
        CHECK(rep.p_value == doctest::Approx(0.0213116411).epsilon(1e-6));
        CHECK(rep.significant_at_0p05);
    }
    SUBCASE("identical constant samples are the null case") {
        const TTestReport rep =
            welch_t_test(std::vector<double>{2, 2, 2}, std::vector<double>{2, 2, 2});
        CHECK(rep.t == 0.0);
        CHECK(rep.p_value == 1.0);
        CHECK_FALSE(rep.significant_at_0p05);
    }
    SUBCASE("swapping arguments negates t and keeps p") {
        const std::vector<double> a = {0.4, 0.45, 0.5};
        const std::vector<double> b = {0.52, 0.58, 0.61};
        const TTestReport ab = welch_t_test(a, b);
        const TTestReport ba = welch_t_test(b, a);
        CHECK(ab.t == doctest::Approx(-ba.t).epsilon(1e-12));
        CHECK(ab.p_value == doctest::Approx(ba.p_value).epsilon(1e-12));
    }
    SUBCASE("tiny samples are rejected") {
        CHECK_THROWS_AS(welch_t_test(std::vector<double>{1.0}, std::vector<double>{1, 2}),
                        std::invalid_argument);
    }
    SUBCASE("p values are roughly uniform under the null") {
        std::mt19937_64 rng(29);
        std::normal_distribution<double> dist(0.0, 1.0);
        std::size_t below = 0;
        const std::size_t pairs = 1000;
        for (std::size_t i = 0; i < pairs; ++i) {
            std::vector<double> a(5);
            std::vector<double> b(5);
            for (double& v : a) v = dist(rng);
            for (double& v : b) v = dist(rng);
            if (welch_t_test(a, b).p_value < 0.05) ++below;
        }
        const double frac = double(below) / double(pairs);
        CHECK(frac >= 0.02);
        CHECK(frac <= 0.09);
    }
}

TEST_CASE("curve mean and spread") {
    SUBCASE("single curve has zero spread by convention") {
        const CurveStats stats = curve_mean_and_spread({{0.1, 0.2, 0.3}});
        CHECK(stats.mean == std::vector<double>{0.1, 0.2, 0.3});
        CHECK(stats.stddev == std::vector<double>{0.0, 0.0, 0.0});
    }
    SUBCASE("identical curves have zero spread") {
        const CurveStats stats = curve_mean_and_spread({{0.4, 0.5}, {0.4, 0.5}});
        CHECK(stats.stddev[0] == doctest::Approx(0.0));
        CHECK(stats.stddev[1] == doctest::Approx(0.0));
    }
    SUBCASE("two-point spread") {
        const CurveStats stats = curve_mean_and_spread({{0.4}, {0.6}});
        CHECK(stats.mean[0] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(stats.stddev[0] == doctest::Approx(std::sqrt(0.02)).epsilon(1e-9));
    }
    SUBCASE("length mismatch throws") {
        CHECK_THROWS_AS(curve_mean_and_spread({{0.1}, {0.1, 0.2}}), std::invalid_argument);
    }
}

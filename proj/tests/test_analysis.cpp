#include "mpnc/analysis.hpp"
#include "mpnc/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace mpnc;
using namespace mpnc::analysis;

namespace {

// Tail-bounded summation of f(x) for x >= start. The pmf tail ratio
// approaches lambda*e^(1-lambda) < 1, with a x^2/(x^2-1) nuisance factor;
// stop once a geometric majorant of the remaining (weighted) mass is below
// tol.
template <typename F>
double adaptive_sum(F&& term, double lambda, std::int64_t start, double weight_power,
                    double tol = 1e-13) {
    double sum = 0.0;
    const double base_ratio = lambda * std::exp(1.0 - lambda);
    for (std::int64_t x = start;; ++x) {
        const double t = term(x);
        sum += t;
        if (x < 3) continue;
        const double xd = static_cast<double>(x);
        double ratio = base_ratio * (xd * xd) / (xd * xd - 1.0);
        ratio *= std::pow((xd + 1.0) / xd, weight_power);
        if (ratio < 1.0) {
            const double tail = t * ratio / (1.0 - ratio);
            if (tail < tol && t < tol) return sum;
        }
        if (x > 2'000'000) return sum;  // safety stop
    }
}

LossModel single_path_model(double erasure, std::uint32_t interval) {
    std::vector<PathSpec> paths{{1.0, erasure, 0.0}};
    return build_loss_model(paths, CodingPolicy::single_coded(1, 0, interval));
}

}  // namespace

TEST_CASE("loss model construction") {
    SUBCASE("single path, l = 10, eps = 0.01") {
        const auto model = single_path_model(0.01, 10);
        CHECK(model.coded_interval == doctest::Approx(10.0).epsilon(1e-12));
        REQUIRE(model.info_per_interval.size() == 1);
        CHECK(model.info_per_interval[0] == doctest::Approx(9.0).epsilon(1e-12));
        CHECK(model.lambda == doctest::Approx(0.1).epsilon(1e-12));
    }
    SUBCASE("lossless paths give lambda = 0") {
        std::vector<PathSpec> paths{{2.0, 0.0, 0.0}, {1.0, 0.0, 0.0}};
        const auto model = build_loss_model(paths, CodingPolicy::single_coded(2, 0, 5));
        CHECK(model.lambda == 0.0);
    }
    SUBCASE("two paths r = (4,3), coded on path 1, l = 10") {
        std::vector<PathSpec> paths{{4.0, 0.01, 0.0}, {3.0, 0.01, 0.0}};
        const auto model = build_loss_model(paths, CodingPolicy::single_coded(2, 0, 10));
        REQUIRE(model.info_per_interval.size() == 2);
        CHECK(model.info_per_interval[0] == doctest::Approx(9.0).epsilon(1e-12));
        CHECK(model.info_per_interval[1] == doctest::Approx(6.75).epsilon(1e-12));
        CHECK(model.lambda == doctest::Approx(0.1675).epsilon(1e-12));
    }
    SUBCASE("inadmissible policies are rejected") {
        std::vector<PathSpec> paths{{1.0, 0.2, 0.0}};
        CHECK_THROWS_AS(build_loss_model(paths, CodingPolicy::single_coded(1, 0, 10)),
                        AnalysisError);
    }
    SUBCASE("repair on more than one path is rejected") {
        std::vector<PathSpec> paths{{1.0, 0.01, 0.0}, {1.0, 0.01, 0.0}};
        CodingPolicy pol{{0.9, 0.9}, 0};
        CHECK_THROWS_AS(build_loss_model(paths, pol), AnalysisError);
    }
}

TEST_CASE("poisson pmf") {
    CHECK(poisson_pmf(0, 0.0) == 1.0);
    CHECK(poisson_pmf(0, 0.4) == doctest::Approx(std::exp(-0.4)).epsilon(1e-12));
    CHECK(poisson_pmf(1, 0.1) == doctest::Approx(0.1 * std::exp(-0.1)).epsilon(1e-12));
    CHECK(poisson_pmf(1, 0.1) == doctest::Approx(0.0904837).epsilon(1e-6));
    CHECK(poisson_pmf(-1, 0.1) == 0.0);

    for (double lambda : {0.05, 0.3, 1.0}) {
        double sum = 0.0;
        for (int y = 0; y <= 200; ++y) sum += poisson_pmf(y, lambda);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("borel-tanner pmf") {
    CHECK(borel_tanner_pmf(1, 1, 0.3) == doctest::Approx(std::exp(-0.3)).epsilon(1e-12));
    CHECK(borel_tanner_pmf(2, 2, 0.3) == doctest::Approx(std::exp(-0.6)).epsilon(1e-12));
    CHECK(borel_tanner_pmf(1, 2, 0.3) == 0.0);
    CHECK(borel_tanner_pmf(0, 0, 0.3) == 0.0);

    SUBCASE("normalizes over z for several initial backlogs") {
        const double lambda = 0.3;
        for (std::int64_t y : {1, 2, 5}) {
            const double sum = adaptive_sum(
                [&](std::int64_t z) { return borel_tanner_pmf(z, y, lambda); }, lambda, y, 0.0,
                1e-14);
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("inter-decode-time pmf") {
    SUBCASE("lambda = 0 is a point mass at zero") {
        CHECK(x_pmf(0, 0.0) == 1.0);
        CHECK(x_pmf(1, 0.0) == 0.0);
        CHECK(x_pmf(5, 0.0) == 0.0);
    }
    SUBCASE("worked values at lambda = 0.1") {
        CHECK(x_pmf(0, 0.1) == doctest::Approx(0.904837).epsilon(1e-6));
        CHECK(x_pmf(1, 0.1) == doctest::Approx(0.0904837).epsilon(1e-6));
        CHECK(x_pmf(2, 0.1) == doctest::Approx(0.5 * 0.01 * std::exp(-0.2)).epsilon(1e-12));
        CHECK(x_pmf(-3, 0.1) == 0.0);
    }
    SUBCASE("normalizes and matches closed-form moments across the lambda grid") {
        for (double lambda = 0.05; lambda < 0.95; lambda += 0.05) {
            const double total = adaptive_sum(
                [&](std::int64_t x) { return x_pmf(x, lambda); }, lambda, 0, 0.0);
            CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

            const auto m = x_moments(lambda);
            const double mean = adaptive_sum(
                [&](std::int64_t x) { return static_cast<double>(x) * x_pmf(x, lambda); },
                lambda, 0, 1.0);
            const double second = adaptive_sum(
                [&](std::int64_t x) {
                    return static_cast<double>(x) * static_cast<double>(x) * x_pmf(x, lambda);
                },
                lambda, 0, 2.0);
            CHECK(std::abs(mean - m.mean) < 1e-8);
            CHECK(std::abs(second - m.second_moment) < 1e-8);
        }
    }
    SUBCASE("closed forms at lambda = 0.1") {
        const auto m = x_moments(0.1);
        CHECK(m.mean == doctest::Approx(0.100537).epsilon(1e-5));
        CHECK(m.second_moment == doctest::Approx(0.112948).epsilon(1e-5));
        CHECK(m.w_mean == doctest::Approx(1.00537).epsilon(1e-5));
    }
    SUBCASE("moments diverge at lambda >= 1") {
        CHECK_THROWS_AS(x_moments(1.0), AnalysisError);
        CHECK_THROWS_AS(x_moments(1.3), AnalysisError);
    }
}

TEST_CASE("convolution identity behind the inter-decode law") {
    // pmf(x) = sum_y poisson(y) * borel_tanner(x-1 | y-1) for x >= 2
    for (double lambda : {0.1, 0.3, 0.5}) {
        for (std::int64_t x = 2; x <= 50; ++x) {
            double conv = 0.0;
            for (std::int64_t y = 2; y <= x; ++y) {
                conv += poisson_pmf(y, lambda) * borel_tanner_pmf(x - 1, y - 1, lambda);
            }
            CHECK(std::abs(conv - x_pmf(x, lambda)) < 1e-10);
        }
    }
}

TEST_CASE("waiting-time pmf W = max(X, 1)") {
    const double lambda = 0.1;
    CHECK(w_pmf(0, lambda) == 0.0);
    CHECK(w_pmf(1, lambda) ==
          doctest::Approx(x_pmf(0, lambda) + x_pmf(1, lambda)).epsilon(1e-12));
    CHECK(w_pmf(1, lambda) == doctest::Approx(0.995321).epsilon(1e-6));
    CHECK(w_pmf(3, lambda) == doctest::Approx(x_pmf(3, lambda)).epsilon(1e-12));

    const double sum = adaptive_sum(
        [&](std::int64_t w) { return w_pmf(w, 0.5); }, 0.5, 1, 0.0);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));

    // E[W] = E[X] / lambda
    const auto m = x_moments(0.5);
    const double w_mean = adaptive_sum(
        [&](std::int64_t w) { return static_cast<double>(w) * w_pmf(w, 0.5); }, 0.5, 1, 1.0);
    CHECK(w_mean == doctest::Approx(m.w_mean).epsilon(1e-8));
}

TEST_CASE("expected in-order delay") {
    SUBCASE("single-path closed form") {
        CHECK(expected_delay_single_slots(0.0, 10) == 0.0);
        CHECK(expected_delay_single_slots(0.4, 1) == 0.0);
        CHECK(expected_delay_single_slots(0.1, 10) == doctest::Approx(0.50556).epsilon(1e-4));
        CHECK_THROWS_AS(expected_delay_single_slots(1.0, 10), AnalysisError);
    }
    SUBCASE("multipath formula collapses to the single-path one for |P| = 1") {
        auto rng = make_rng(77, 0);
        for (int trial = 0; trial < 100; ++trial) {
            const double lambda = 0.01 + 0.95 * uniform_double(rng);
            const double lc = 2.0 + std::floor(48.0 * uniform_double(rng));
            const double rc = 0.1 + 100.0 * uniform_double(rng);
            LossModel model;
            model.lambda = lambda;
            model.coded_interval = lc;
            model.coded_rate = rc;
            model.coded_path = 0;
            std::vector<PathSpec> paths{{rc, 0.0, 0.0}};
            const auto est = expected_delay_multipath(model, paths);
            const double single = expected_delay_single_slots(lambda, lc);
            CHECK(std::abs(est.slots - single) <= 1e-12 * single);
            CHECK(est.seconds == doctest::Approx(est.slots / rc).epsilon(1e-12));
        }
    }
    SUBCASE("lossless multipath delay is zero") {
        std::vector<PathSpec> paths{{4.0, 0.0, 0.0}, {3.0, 0.0, 0.0}};
        const auto model = build_loss_model(paths, CodingPolicy::single_coded(2, 0, 10));
        CHECK(expected_delay_multipath(model, paths).slots == 0.0);
    }
    SUBCASE("two-path value matches the renewal-reward route") {
        // Independent derivation: E[T] = E[R_n] / (l_c E[W]) with the
        // same X-moment substitution as the closed form.
        std::vector<PathSpec> paths{{4.0, 0.01, 0.0}, {3.0, 0.01, 0.0}};
        const auto model = build_loss_model(paths, CodingPolicy::single_coded(2, 0, 10));
        CHECK(model.lambda == doctest::Approx(0.1675).epsilon(1e-12));

        const auto m = x_moments(model.lambda);
        const double lc = model.coded_interval;
        const double rc = model.coded_rate;
        double rate_sum = 0.0;
        for (const auto& p : paths) rate_sum += p.rate;
        double reward = lc * rc / 2.0 * (lc - 1.0) * m.second_moment;
        for (std::size_t i = 0; i < paths.size(); ++i) {
            if (i == model.coded_path) continue;
            const double ri = paths[i].rate;
            reward += lc * ri * ri / (2.0 * rc * rc) *
                      (lc * ri * m.second_moment - rc * m.mean);
        }
        reward /= rate_sum;
        const double via_reward = reward / (lc * m.w_mean);

        const auto est = expected_delay_multipath(model, paths);
        CHECK(est.slots == doctest::Approx(via_reward).epsilon(1e-10));
        CHECK(est.slots > 0.0);
    }
}

TEST_CASE("monte-carlo renewal oracle") {
    SUBCASE("empirical mean approaches the closed form") {
        const auto res = renewal_oracle(0.3, 200'000, 42);
        const auto m = x_moments(0.3);
        CHECK(res.samples == 200'000);
        CHECK(std::abs(res.mean - m.mean) / m.mean < 0.03);
        CHECK(std::abs(res.second_moment - m.second_moment) / m.second_moment < 0.05);
    }
    SUBCASE("tiny lambda gives a near-zero mean") {
        const auto res = renewal_oracle(0.001, 50'000, 7);
        CHECK(res.mean < 0.01);
    }
    SUBCASE("histogram matches the pmf within 3 standard errors per bin") {
        const std::uint64_t n = 400'000;
        const auto res = renewal_oracle(0.3, n, 2027);
        for (std::int64_t x = 0; x <= 10; ++x) {
            const double p = x_pmf(x, 0.3);
            const double emp =
                x < static_cast<std::int64_t>(res.histogram.size())
                    ? static_cast<double>(res.histogram[x]) / static_cast<double>(n)
                    : 0.0;
            const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
            INFO("x = ", x, " emp = ", emp, " pmf = ", p);
            CHECK(std::abs(emp - p) <= 3.0 * se + 1e-12);
        }
    }
    SUBCASE("convergence improves with sample count") {
        const auto m = x_moments(0.5);
        const auto small = renewal_oracle(0.5, 10'000, 5);
        const auto large = renewal_oracle(0.5, 1'000'000, 5);
        CHECK(std::abs(large.mean - m.mean) <= std::abs(small.mean - m.mean) + 5e-3);
        CHECK(std::abs(large.mean - m.mean) / m.mean < 0.01);
    }
    SUBCASE("domain checks") {
        CHECK_THROWS_AS(renewal_oracle(0.0, 10, 1), std::invalid_argument);
        CHECK_THROWS_AS(renewal_oracle(1.0, 10, 1), std::invalid_argument);
    }
}

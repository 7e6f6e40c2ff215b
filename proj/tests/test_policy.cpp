#include "mpnc/policy.hpp"
#include "mpnc/rng.hpp"

#include <doctest.h>

#include <vector>

using namespace mpnc;

TEST_CASE("path validation") {
    CHECK_NOTHROW(validate_path({1.0, 0.0, 0.0}));
    CHECK_THROWS_AS(validate_path({-1.0, 0.1, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate_path({0.0, 0.1, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate_path({1.0, 1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate_path({1.0, -0.1, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate_path({1.0, 0.1, -2.0}), std::invalid_argument);
    const PathSpec p{4.0, 0.01, 0.05};
    CHECK(p.slot_seconds() == doctest::Approx(0.25));
    CHECK(p.rtt_seconds() == doctest::Approx(0.35));
}

TEST_CASE("admissibility") {
    SUBCASE("lossless paths admit any policy with some redundancy somewhere") {
        std::vector<PathSpec> paths{{2.0, 0.0, 0.0}, {1.0, 0.0, 0.0}};
        CodingPolicy pol{{0.9, 1.0}, 0};
        CHECK(is_admissible(pol, paths));
    }
    SUBCASE("boundary equality is inadmissible") {
        std::vector<PathSpec> paths{{1.0, 0.1, 0.0}};
        CodingPolicy pol{{0.9}, 0};  // c = 1 - eps exactly
        CHECK(!is_admissible(pol, paths));
    }
    SUBCASE("worked two-path example") {
        // 0.99*(0.99-0.9)*4 + 0.99*(0.99-1)*3 = 0.3267 > 0
        std::vector<PathSpec> paths{{4.0, 0.01, 0.0}, {3.0, 0.01, 0.0}};
        CodingPolicy pol{{0.9, 1.0}, 0};
        CHECK(is_admissible(pol, paths));
    }
    SUBCASE("no redundancy anywhere is inadmissible even without losses") {
        std::vector<PathSpec> paths{{1.0, 0.0, 0.0}, {1.0, 0.0, 0.0}};
        CodingPolicy pol{{1.0, 1.0}, 0};
        CHECK(!is_admissible(pol, paths));
    }
    SUBCASE("code rate outside [0,1] is never admissible") {
        std::vector<PathSpec> paths{{1.0, 0.0, 0.0}};
        CHECK(!is_admissible(CodingPolicy{{1.2}, 0}, paths));
        CHECK(!is_admissible(CodingPolicy{{-0.1}, 0}, paths));
    }
}

TEST_CASE("single-coded-path rate bound") {
    SUBCASE("one path collapses to 1 - eps") {
        std::vector<PathSpec> paths{{1.0, 0.05, 0.0}};
        CHECK(max_coded_path_rate(paths, 0) == doctest::Approx(0.95).epsilon(1e-12));
    }
    SUBCASE("worked two-path example") {
        std::vector<PathSpec> paths{{4.0, 0.01, 0.0}, {3.0, 0.01, 0.0}};
        CHECK(max_coded_path_rate(paths, 0) == doctest::Approx(0.9825).epsilon(1e-9));
    }
    SUBCASE("a lossy sibling path can make single-path repair infeasible") {
        std::vector<PathSpec> paths{{1.0, 0.01, 0.0}, {100.0, 0.9, 0.0}};
        CHECK_THROWS_AS(max_coded_path_rate(paths, 0), InfeasiblePolicyError);
    }
    SUBCASE("bound separates admissible from inadmissible") {
        auto rng = make_rng(31, 0);
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t n = 1 + rng() % 3;
            std::vector<PathSpec> paths;
            for (std::size_t i = 0; i < n; ++i) {
                paths.push_back({0.5 + 4.0 * uniform_double(rng),
                                 0.4 * uniform_double(rng), 0.0});
            }
            const std::size_t coded = rng() % n;
            double bound;
            try {
                bound = max_coded_path_rate(paths, coded);
            } catch (const InfeasiblePolicyError&) {
                continue;
            }
            CodingPolicy pol;
            pol.code_rates.assign(n, 1.0);
            pol.coded_path = coded;

            const double below = std::max(0.0, bound - 1e-9);
            pol.code_rates[coded] = below;
            CHECK(is_admissible(pol, paths));

            if (bound + 1e-9 <= 1.0) {
                pol.code_rates[coded] = bound + 1e-9;
                CHECK(!is_admissible(pol, paths));
            }
        }
    }
    SUBCASE("admissibility is monotone in the code rates (eps <= 1/2)") {
        auto rng = make_rng(32, 0);
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t n = 1 + rng() % 3;
            std::vector<PathSpec> paths;
            CodingPolicy pol;
            pol.coded_path = 0;
            for (std::size_t i = 0; i < n; ++i) {
                paths.push_back({0.5 + 4.0 * uniform_double(rng),
                                 0.5 * uniform_double(rng), 0.0});
                pol.code_rates.push_back(uniform_double(rng));
            }
            if (!is_admissible(pol, paths)) continue;
            // lowering any code rate or erasure keeps the policy admissible
            auto pol2 = pol;
            pol2.code_rates[rng() % n] *= uniform_double(rng);
            CHECK(is_admissible(pol2, paths));
            auto paths2 = paths;
            paths2[rng() % n].erasure *= uniform_double(rng);
            CHECK(is_admissible(pol, paths2));
        }
    }
}

TEST_CASE("interval from code rate") {
    CHECK(interval_from_rate(0.0) == 1u);
    CHECK(interval_from_rate(0.9) == 10u);
    CHECK(interval_from_rate(0.8) == 5u);
    CHECK(!interval_from_rate(1.0).has_value());
    CHECK_THROWS_AS(interval_from_rate(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(interval_from_rate(1.5), std::invalid_argument);

    SUBCASE("non-integer spacings round toward more redundancy") {
        CHECK(interval_from_rate(0.45) == 1u);   // 1/(1-c) = 1.818...
        CHECK(interval_from_rate(0.55) == 2u);   // 2.22...
        CHECK(interval_from_rate(0.93) == 14u);  // 14.28...
    }
    SUBCASE("round trip on integer spacings") {
        for (std::uint32_t l = 1; l <= 1000; ++l) {
            const double c = static_cast<double>(l - 1) / static_cast<double>(l);
            CHECK(interval_from_rate(c) == l);
        }
    }
}

TEST_CASE("single_coded policy factory") {
    const auto pol = CodingPolicy::single_coded(3, 1, 10);
    CHECK(pol.coded_path == 1);
    CHECK(pol.code_rates == std::vector<double>{1.0, 0.9, 1.0});
    CHECK_THROWS_AS(CodingPolicy::single_coded(2, 2, 10), std::invalid_argument);
    CHECK_THROWS_AS(CodingPolicy::single_coded(2, 0, 0), std::invalid_argument);
}

#include "anchoring/stats.hpp"

#include "anchoring/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <limits>

using namespace anchoring;

namespace {

std::vector<double> random_diffs(std::uint64_t seed, int n, bool with_ties) {
    SplitMix64 g(seed);
    std::vector<double> d(static_cast<std::size_t>(n));
    for (auto& x : d) {
        x = with_ties ? std::round(4.0 * (g.uniform() - 0.4)) / 2.0 : g.normal() + 0.3;
    }
    return d;
}

}  // namespace

TEST_SUITE("stats") {
    TEST_CASE("paired differences are high minus low") {
        LogProbVector hi{}, lo{};
        hi[3] = -1.0;
        lo[3] = -3.0;
        const auto d = paired_diffs(hi, lo);
        REQUIRE(d.size() == kTargetCount);
        CHECK(d[3] == 2.0);
        CHECK(d[0] == 0.0);
    }

    TEST_CASE("t-test matches quadrature of the t density") {
        for (std::uint64_t s = 1; s <= 20; ++s) {
            const auto d = random_diffs(s, 5 + static_cast<int>(s % 7) * 5, false);
            const auto r = paired_t_test(d);
            CHECK(std::fabs(r.p_value - oracle::t_test_p(d)) < 1e-6);
            CHECK(r.n_effective == static_cast<int>(d.size()));
        }
    }

    TEST_CASE("t-test degenerate inputs") {
        const std::vector<double> zeros(10, 0.0);
        const auto z = paired_t_test(zeros);
        CHECK(z.p_value == 1.0);
        CHECK(z.statistic == 0.0);
        CHECK_FALSE(z.degenerate);
        const std::vector<double> constant(10, 0.25);
        const auto c = paired_t_test(constant);
        CHECK(c.degenerate);
        CHECK(c.p_value == 0.0);
        CHECK(c.statistic == std::numeric_limits<double>::infinity());
        const std::vector<double> neg(10, -0.25);
        CHECK(paired_t_test(neg).statistic == -std::numeric_limits<double>::infinity());
        CHECK_THROWS_AS(paired_t_test(std::vector<double>{1.0}), std::invalid_argument);
        CHECK_THROWS_AS(paired_t_test(std::vector<double>{1.0, NAN}), std::invalid_argument);
    }

    TEST_CASE("midranks average ties and include zeros") {
        const std::vector<double> d{0.0, -1.0, 1.0, 2.0, 0.0};
        const auto r = abs_midranks(d);
        CHECK(r == std::vector<double>{1.5, 3.5, 3.5, 5.0, 1.5});
        CHECK(r == oracle::count_midranks(d));
    }

    TEST_CASE("Wilcoxon exact path equals enumeration for every n up to 12") {
        for (int n = 1; n <= kWilcoxonExactLimit; ++n) {
            for (bool ties : {false, true}) {
                const auto d = random_diffs(100 + static_cast<std::uint64_t>(n) * 2 + ties, n, ties);
                const auto r = wilcoxon_pratt(d);
                CHECK(r.exact == (r.n_effective > 0));
                CHECK(std::fabs(r.p_value - oracle::wilcoxon_enumeration_p(d)) < 1e-12);
            }
        }
    }

    TEST_CASE("Wilcoxon statistic and zeros") {
        const std::vector<double> d{0.0, 1.0, 2.0, -3.0};
        const auto r = wilcoxon_pratt(d);
        // ranks 1,2,3,4 -> W+ = 5, W- = 4
        CHECK(r.statistic == 1.0);
        CHECK(r.n_effective == 3);
        const std::vector<double> zeros(30, 0.0);
        CHECK(wilcoxon_pratt(zeros).p_value == 1.0);
        CHECK(wilcoxon_pratt(zeros).statistic == 0.0);
    }

    TEST_CASE("Wilcoxon normal approximation") {
        // Reference p-values frozen from scipy.stats.wilcoxon(zero_method="pratt",
        // correction=True, method="approx") on the same vectors.
        const std::array<double, 4> frozen = {0.2575044440955485, 0.37210754321799655, 0.045143342681175834,
                                              0.11093669441174066};
        for (std::uint64_t s = 0; s < 4; ++s) {
            const bool ties = s % 2 == 1;
            const auto d = random_diffs(900 + s, 18, ties);
            const auto r = wilcoxon_pratt(d);
            CHECK_FALSE(r.exact);
            CHECK(std::fabs(r.p_value - frozen[s]) < 1e-12);
            // Without ties the approximation is close to the exact null already at n = 18.
            if (!ties) CHECK(std::fabs(r.p_value - oracle::wilcoxon_enumeration_p(d)) < 0.02);
        }
    }

    TEST_CASE("Wilcoxon is antisymmetric under negation") {
        auto d = random_diffs(7, 40, true);
        const auto a = wilcoxon_pratt(d);
        for (auto& x : d) x = -x;
        const auto b = wilcoxon_pratt(d);
        CHECK(a.statistic == -b.statistic);
        CHECK(a.p_value == b.p_value);
    }

    TEST_CASE("exact sign-flip enumeration equals the binomial null") {
        for (int n = 1; n <= 12; ++n) {
            for (int pos = 0; pos <= n; ++pos) {
                std::vector<double> d(static_cast<std::size_t>(n), -0.7);
                for (int k = 0; k < pos; ++k) d[static_cast<std::size_t>(k)] = 0.7;
                const double p = permutation_sign_test_exact(d).p_value;
                CHECK(std::fabs(p - oracle::sign_flip_binomial_p(n, pos)) < 1e-12);
            }
        }
    }

    TEST_CASE("Monte Carlo sign-flip converges to the enumeration") {
        const auto d = random_diffs(31, 12, false);
        const double exact = permutation_sign_test_exact(d).p_value;
        const double mc = permutation_sign_test(d, 40000, 5).p_value;
        CHECK(std::fabs(mc - exact) < 0.01);
    }

    TEST_CASE("sign-flip bookkeeping") {
        const std::vector<double> zeros(101, 0.0);
        CHECK(permutation_sign_test(zeros, 500, 1).p_value == 1.0);
        CHECK(permutation_sign_test_exact(std::vector<double>(8, 0.0)).p_value == 1.0);
        const std::vector<double> strong(101, 0.5);
        const auto r = permutation_sign_test(strong, 999, 2);
        CHECK(r.p_value == doctest::Approx(1.0 / 1000.0));
        CHECK(r.statistic == doctest::Approx(0.5));
        CHECK(permutation_sign_test(strong, 999, 2).p_value == permutation_sign_test(strong, 999, 2).p_value);
        CHECK_THROWS_AS(permutation_sign_test(strong, 0, 2), std::invalid_argument);
        CHECK_THROWS_AS(permutation_sign_test_exact(std::vector<double>(21, 1.0)), std::invalid_argument);
    }

    TEST_CASE("stars and direction calls") {
        CHECK(star_count(0.2) == 0);
        CHECK(star_count(0.10) == 0);
        CHECK(star_count(0.0999) == 1);
        CHECK(star_count(0.05) == 1);
        CHECK(star_count(0.049) == 2);
        CHECK(star_count(0.01) == 2);
        CHECK(star_count(0.0099) == 3);
        CHECK(direction_call(CallSide::Behavioral, 3.2, 0.001).label() == "B+***");
        CHECK(direction_call(CallSide::Attributional, -0.4, 0.03).label() == "A-**");
        CHECK(direction_call(CallSide::Behavioral, 0.0, 0.5).label() == "B0");
        CHECK(direction_call(CallSide::Behavioral, 1e-300, 0.5).direction == 1);
        CHECK_THROWS_AS(direction_call(CallSide::Behavioral, 1.0, 1.5), std::invalid_argument);
        const StarThresholds strict{{0.05, 0.01, 0.001}};
        CHECK(star_count(0.02, strict) == 1);
    }
}

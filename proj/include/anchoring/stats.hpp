#pragma once

#include "anchoring/scorer.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace anchoring {

/// d_i = l_i(high) - l_i(low), nats.
std::vector<double> paired_diffs(const LogProbVector& high, const LogProbVector& low);

enum class TestMethod : std::uint8_t { T, Wilcoxon, Permutation };
std::string_view method_name(TestMethod m);

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    TestMethod method = TestMethod::T;
    int n_effective = 0;
    /// t-test only: zero variance with a nonzero mean (statistic is +-inf, p is 0).
    bool degenerate = false;
    /// Wilcoxon only: p from exact null enumeration rather than the normal approximation.
    bool exact = false;
};

/// Two-sided one-sample t-test of mean(d) = 0 with n-1 degrees of freedom.
TestResult paired_t_test(std::span<const double> d);

inline constexpr int kWilcoxonExactLimit = 12;

/// Two-sided Wilcoxon signed-rank test, Pratt treatment of zeros: |d| is ranked with
/// the zeros included, then zero ranks are left out of the signed sums. The
/// statistic is W+ - W-. Exact null distribution for up to 12 nonzero entries,
/// otherwise a tie-corrected normal approximation with continuity correction.
TestResult wilcoxon_pratt(std::span<const double> d);

/// Midranks of |d| (1-based), ties averaged.
std::vector<double> abs_midranks(std::span<const double> d);

inline constexpr int kDefaultPermutations = 10000;

/// Rademacher sign-flip test on mean(d): p = (1 + #{|mean*| >= |mean|}) / (1 + B).
/// Resample b uses the stream derive_seed(seed, b).
TestResult permutation_sign_test(std::span<const double> d, int resamples = kDefaultPermutations,
                                 std::uint64_t seed = 0);

/// Full enumeration of all 2^n sign patterns (n <= 20): p = #{|mean*| >= |mean|} / 2^n.
TestResult permutation_sign_test_exact(std::span<const double> d);

struct StarThresholds {
    std::array<double, 3> levels{0.10, 0.05, 0.01};
};

enum class CallSide : std::uint8_t { Behavioral, Attributional };

struct DirectionCall {
    CallSide side = CallSide::Behavioral;
    int direction = 0;  // +1, -1, 0
    int stars = 0;
    double p_value = 1.0;

    /// "B+***", "A-", "B0*".
    std::string label() const;
};

/// Direction from the sign of `gap` (0 only for an exactly zero gap); one star for
/// each threshold that p falls strictly below.
DirectionCall direction_call(CallSide side, double gap, double p, const StarThresholds& thresholds = {});

/// Stars only, for the robustness columns.
int star_count(double p, const StarThresholds& thresholds = {});

}  // namespace anchoring

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "jumpkit/core.hpp"

namespace jumpkit {

struct FdrResult {
    double q_target = 0.10;
    double threshold_p = 0.0;           // 0 when nothing is rejected
    std::vector<std::size_t> rejected;  // indices into the input, ascending
};

// Benjamini–Hochberg step-up at level q.
FdrResult fdr_select(std::span<const double> p_values, double q = 0.10);

struct GroupSummary {
    std::size_t n = 0;
    std::optional<double> mean;
    std::optional<double> mean_abs;
    std::optional<double> median_abs;
    std::optional<double> max;
    std::optional<double> min;
    std::optional<double> std_dev;   // n - 1 denominator; needs n >= 2
    std::optional<double> skewness;  // m3 / m2^1.5; needs n >= 2 and spread
    std::optional<double> kurtosis;  // m4 / m2² (not excess)
};

struct JumpSummary {
    GroupSummary all;
    GroupSummary positive;
    GroupSummary negative;
};

GroupSummary summarize(std::span<const double> sizes);
JumpSummary jump_summary(std::span<const double> sizes);

struct RunsTestResult {
    std::size_t n_jump_days = 0;
    std::size_t n_quiet_days = 0;
    std::size_t runs_observed = 0;
    double expected_runs = 0.0;
    double variance = 0.0;
    double z = 0.0;
    double p_normal = 1.0;  // two-sided normal approximation
    double p_value = 1.0;   // exact when `exact`, else p_normal
    bool exact = false;
};

// Wald–Wolfowitz runs test. When either category has fewer than
// `exact_below` members the reported p-value comes from the exact null
// distribution of the run count.
RunsTestResult runs_test(const std::vector<bool>& flags, std::size_t exact_below = 10);

// Two-sided exact p-value P(|R - μ| >= |r - μ|) for n1 and n2 symbols.
double runs_exact_p_value(std::size_t n1, std::size_t n2, std::size_t runs);

struct SubPeriod {
    Date first{};
    Date last{};  // inclusive
};

// 2011-06-26..2012-04-16, 2012-04-17..2013-02-06, 2013-02-07..2013-11-29.
std::vector<SubPeriod> default_subperiods();
// 1-based index of the sub-period containing `d`, 0 when outside all of them.
int subperiod_of(Date d, std::span<const SubPeriod> periods);

}  // namespace jumpkit

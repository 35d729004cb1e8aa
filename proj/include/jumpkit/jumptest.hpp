#pragma once

// Daily pre-averaged maximum-increment jump test with Gumbel asymptotics.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jumpkit/estimators.hpp"
#include "jumpkit/series.hpp"

namespace jumpkit {

struct JumpTestConfig {
    int k = 4;                   // noise dependence span
    double block_const = 0.2;    // C in M = ⌊C (n/k)^½⌋
    double preavg_const = 0.2;   // c in V̂ = (2/3) c² σ̂²T + 2 q̂²
    std::size_t min_increments = 10;

    // M, floored at 2.
    std::size_t block_size(std::size_t n) const;
    // Days thinner than 2·k·M·min_increments are not tested.
    std::size_t min_ticks(std::size_t n) const;
    void validate() const;
};

struct PreAveraged {
    std::size_t tick_index = 0;  // first tick of the block
    Instant time{};
    double value = 0.0;
};

// Block means P̂ at j = 0, kM, 2kM, ...; requires n ≥ 2kM.
std::vector<PreAveraged> preaverage(const DaySeries& day, const JumpTestConfig& cfg);

struct GumbelConstants {
    double a = 0.0;
    double b = 0.0;
};
// Aₙ, Bₙ for ⌊n/(kM)⌋ = blocks.
GumbelConstants gumbel_constants(std::size_t blocks);
// 1 - exp(-e^{-x})
double gumbel_p_value(double x);

struct JumpDetection {
    Date date{};
    double statistic_std = 0.0;
    double p_value = 1.0;
    // Support of the maximizing increment: first tick of block j* to the last
    // sampled tick of block j*+1.
    Instant loc_start{};
    Instant loc_end{};
    double jump_size = 0.0;  // signed ℒ(t_{j*})
    std::size_t n = 0;
    std::size_t block_size = 0;
    std::size_t blocks = 0;
    double variance = 0.0;   // V̂ used for standardization
    double sigma2T = 0.0;
    double q2 = 0.0;
};

JumpDetection lm_statistic(const DaySeries& day, const JumpTestConfig& cfg, double asymptotic_var);

// noise_variance -> robust_volatility -> asymptotic_variance -> lm_statistic.
JumpDetection test_day(const DaySeries& day, const JumpTestConfig& cfg = {});

// Per-day result; `detection` is empty for untested days and `reason` says why.
struct DayOutcome {
    Date date{};
    std::size_t n = 0;
    std::optional<JumpDetection> detection;
    std::string reason;
};

DayOutcome try_test_day(const DaySeries& day, const JumpTestConfig& cfg = {});
std::vector<DayOutcome> test_days(std::span<const DaySeries> days, const JumpTestConfig& cfg = {},
                                  unsigned threads = 1);

}  // namespace jumpkit

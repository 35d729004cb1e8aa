#pragma once

// Noise-robust variance estimators feeding the jump test.

#include <cstddef>
#include <span>
#include <vector>

#include "jumpkit/series.hpp"

namespace jumpkit {

struct NoiseEstimate {
    double q2 = 0.0;  // squared log-price units
    int k = 4;        // noise dependence span
};

struct VolEstimate {
    double sigma2T = 0.0;  // integrated variance over the sample
    bool floored = false;  // bias correction went negative and was clamped to 0
    std::size_t block_size = 0;
    std::size_t blocks = 0;
};

// q̂² = 1/(2(n-k)) Σ (P_m - P_{m+k})². Requires n > k.
NoiseEstimate noise_variance(std::span<const double> log_prices, int k = 4);
inline NoiseEstimate noise_variance(const DaySeries& day, int k = 4) {
    return noise_variance(day.log_prices, k);
}

// Means of consecutive blocks of M prices sampled every k-th tick; block b
// averages ticks b·kM, b·kM + k, ..., b·kM + (M-1)k. Partial trailing blocks
// are dropped.
std::vector<double> block_means(std::span<const double> log_prices, int k, std::size_t block_size);

// Pre-averaged bipower variation. Blocks use M = max(1, ⌊c (n/k)^½⌋); with
// increments ℒ_b between consecutive block means,
//   BV  = (π/2) mean_b |ℒ_b| |ℒ_{b+2}|
//   σ̂²T = (BV - 2q̂²/M) / ((k/n)(2M/3 + 1/(3M)))
// where the denominator is the Brownian variance weight of a block-mean
// difference. Increments two apart share no ticks, and a jump enters at most
// four products, so the estimator stays consistent under noise and finitely
// many jumps.
VolEstimate robust_volatility(std::span<const double> log_prices, int k = 4,
                              double preavg_const = 0.2, std::size_t min_blocks = 30);
inline VolEstimate robust_volatility(const DaySeries& day, int k = 4, double preavg_const = 0.2,
                                     std::size_t min_blocks = 30) {
    return robust_volatility(day.log_prices, k, preavg_const, min_blocks);
}

// V̂ = (2/3) c² σ̂²T + 2 q̂²
double asymptotic_variance(const VolEstimate& vol, const NoiseEstimate& noise, double c = 0.2);

}  // namespace jumpkit

#include "jumpkit/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace jumpkit {

NoiseEstimate noise_variance(std::span<const double> log_prices, int k) {
    if (k < 1) throw std::invalid_argument("noise span k must be >= 1");
    const std::size_t n = log_prices.size();
    const auto ku = static_cast<std::size_t>(k);
    if (n <= ku) {
        throw InsufficientData("noise variance needs more than k=" + std::to_string(k) +
                               " observations, got " + std::to_string(n));
    }
    double ss = 0.0;
    for (std::size_t m = 0; m + ku < n; ++m) {
        const double d = log_prices[m] - log_prices[m + ku];
        ss += d * d;
    }
    return NoiseEstimate{ss / (2.0 * static_cast<double>(n - ku)), k};
}

std::vector<double> block_means(std::span<const double> log_prices, int k, std::size_t block_size) {
    const auto ku = static_cast<std::size_t>(k);
    const std::size_t span = ku * block_size;
    const std::size_t blocks = span == 0 ? 0 : log_prices.size() / span;
    std::vector<double> means(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < block_size; ++i) s += log_prices[b * span + i * ku];
        means[b] = s / static_cast<double>(block_size);
    }
    return means;
}

VolEstimate robust_volatility(std::span<const double> log_prices, int k, double preavg_const,
                              std::size_t min_blocks) {
    if (k < 1) throw std::invalid_argument("noise span k must be >= 1");
    if (!(preavg_const > 0.0)) throw std::invalid_argument("pre-averaging constant must be positive");
    const std::size_t n = log_prices.size();
    const double nd = static_cast<double>(n);
    const auto M = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(preavg_const * std::sqrt(nd / k))));
    const std::size_t blocks = n / (static_cast<std::size_t>(k) * M);
    const std::size_t need = std::max<std::size_t>(min_blocks, 4);
    if (blocks < need) {
        throw InsufficientData("robust volatility needs " + std::to_string(need) +
                               " pre-averaging blocks, got " + std::to_string(blocks));
    }

    const auto means = block_means(log_prices, k, M);
    std::vector<double> inc(blocks - 1);
    for (std::size_t b = 0; b + 1 < blocks; ++b) inc[b] = means[b + 1] - means[b];

    double acc = 0.0;
    for (std::size_t b = 0; b + 2 < inc.size(); ++b) acc += std::abs(inc[b]) * std::abs(inc[b + 2]);
    const double bv = 0.5 * std::numbers::pi * acc / static_cast<double>(inc.size() - 2);

    const double q2 = noise_variance(log_prices, k).q2;
    const double Md = static_cast<double>(M);
    const double weight = (static_cast<double>(k) / nd) * (2.0 * Md / 3.0 + 1.0 / (3.0 * Md));

    VolEstimate out;
    out.block_size = M;
    out.blocks = blocks;
    out.sigma2T = (bv - 2.0 * q2 / Md) / weight;
    if (out.sigma2T < 0.0) {
        out.sigma2T = 0.0;
        out.floored = true;
    }
    return out;
}

double asymptotic_variance(const VolEstimate& vol, const NoiseEstimate& noise, double c) {
    return (2.0 / 3.0) * c * c * vol.sigma2T + 2.0 * noise.q2;
}

}  // namespace jumpkit

#include "jumpkit/jumptest.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

namespace jumpkit {

std::size_t JumpTestConfig::block_size(std::size_t n) const {
    const double m = std::floor(block_const * std::sqrt(static_cast<double>(n) / k));
    return std::max<std::size_t>(2, static_cast<std::size_t>(std::max(m, 0.0)));
}

std::size_t JumpTestConfig::min_ticks(std::size_t n) const {
    return 2 * static_cast<std::size_t>(k) * block_size(n) * min_increments;
}

void JumpTestConfig::validate() const {
    if (k < 1) throw ConfigError("jump test k must be >= 1");
    if (!(block_const > 0.0)) throw ConfigError("jump test block constant must be positive");
    if (!(preavg_const > 0.0)) throw ConfigError("pre-averaging constant must be positive");
    if (min_increments < 1) throw ConfigError("min_increments must be >= 1");
}

std::vector<PreAveraged> preaverage(const DaySeries& day, const JumpTestConfig& cfg) {
    const std::size_t n = day.n();
    const std::size_t M = cfg.block_size(n);
    const std::size_t span = static_cast<std::size_t>(cfg.k) * M;
    if (n < 2 * span) {
        throw InsufficientData("pre-averaging needs n >= 2kM = " + std::to_string(2 * span) +
                               ", got " + std::to_string(n));
    }
    const auto means = block_means(day.log_prices, cfg.k, M);
    std::vector<PreAveraged> out(means.size());
    for (std::size_t b = 0; b < means.size(); ++b) {
        out[b] = PreAveraged{b * span, day.times[b * span], means[b]};
    }
    return out;
}

GumbelConstants gumbel_constants(std::size_t blocks) {
    const double lm = std::log(static_cast<double>(blocks));
    const double root = std::sqrt(2.0 * lm);
    return GumbelConstants{root - (std::log(std::numbers::pi) + std::log(lm)) / (2.0 * root),
                           1.0 / root};
}

double gumbel_p_value(double x) { return -std::expm1(-std::exp(-x)); }

JumpDetection lm_statistic(const DaySeries& day, const JumpTestConfig& cfg, double asymptotic_var) {
    if (!(asymptotic_var > 0.0) || !std::isfinite(asymptotic_var)) {
        throw DegenerateVariance("asymptotic variance must be positive, got " +
                                 std::to_string(asymptotic_var));
    }
    const auto pre = preaverage(day, cfg);
    const std::size_t n = day.n();
    const std::size_t M = cfg.block_size(n);
    const std::size_t ku = static_cast<std::size_t>(cfg.k);

    std::size_t best = 0;
    double best_abs = -1.0;
    for (std::size_t j = 0; j + 1 < pre.size(); ++j) {
        const double a = std::abs(pre[j + 1].value - pre[j].value);
        if (a > best_abs) {
            best_abs = a;
            best = j;
        }
    }

    const auto g = gumbel_constants(pre.size());
    JumpDetection d;
    d.date = day.date;
    d.n = n;
    d.block_size = M;
    d.blocks = pre.size();
    d.variance = asymptotic_var;
    d.jump_size = pre[best + 1].value - pre[best].value;
    d.statistic_std =
        (std::sqrt(static_cast<double>(M) / asymptotic_var) * best_abs - g.a) / g.b;
    d.p_value = gumbel_p_value(d.statistic_std);
    d.loc_start = day.times[pre[best].tick_index];
    d.loc_end = day.times[pre[best + 1].tick_index + (M - 1) * ku];
    return d;
}

JumpDetection test_day(const DaySeries& day, const JumpTestConfig& cfg) {
    const std::size_t n = day.n();
    if (n < cfg.min_ticks(n)) {
        throw InsufficientData("day " + format_date(day.date) + " has " + std::to_string(n) +
                               " ticks, needs " + std::to_string(cfg.min_ticks(n)));
    }
    const auto noise = noise_variance(day, cfg.k);
    const auto vol = robust_volatility(day, cfg.k, cfg.preavg_const);
    auto d = lm_statistic(day, cfg, asymptotic_variance(vol, noise, cfg.preavg_const));
    d.sigma2T = vol.sigma2T;
    d.q2 = noise.q2;
    return d;
}

DayOutcome try_test_day(const DaySeries& day, const JumpTestConfig& cfg) {
    DayOutcome out;
    out.date = day.date;
    out.n = day.n();
    try {
        out.detection = test_day(day, cfg);
    } catch (const InsufficientData& e) {
        out.reason = std::string("insufficient data: ") + e.what();
    } catch (const DegenerateVariance& e) {
        out.reason = std::string("degenerate variance: ") + e.what();
    }
    return out;
}

std::vector<DayOutcome> test_days(std::span<const DaySeries> days, const JumpTestConfig& cfg,
                                  unsigned threads) {
    std::vector<DayOutcome> out(days.size());
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(days.size())));
    if (threads <= 1) {
        for (std::size_t i = 0; i < days.size(); ++i) out[i] = try_test_day(days[i], cfg);
        return out;
    }
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < days.size(); i += threads) {
                    out[i] = try_test_day(days[i], cfg);
                }
            });
        }
    }
    return out;
}

}  // namespace jumpkit

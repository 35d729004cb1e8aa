#pragma once

// Synthetic tick days: Brownian log-price with jumps plus MA microstructure noise.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "jumpkit/ingest.hpp"
#include "jumpkit/series.hpp"

namespace jumpkit {

// Multiplies trade sizes on [from, to), offsets from the start of the day.
struct ActivityShock {
    Micros from{};
    Micros to{};
    double size_multiplier = 1.0;
};

struct SimScenario {
    Date date = Date{std::chrono::year{2011} / std::chrono::June / 26};
    std::size_t n = 20000;     // ticks per day
    double sigma = 0.04;       // daily volatility, log units
    double start_log_price = 4.6;
    std::vector<Micros> jump_offsets;  // from the start of the day
    std::vector<double> jump_sizes;    // log units
    double noise_q2 = 1e-7;
    int noise_dependence = 3;          // MA order
    std::vector<double> ma_weights;    // empty: equal weights
    std::uint64_t seed = 1;
    std::size_t trader_pool = 400;
    double trade_size_log_mean = 4.0;  // log USD
    double trade_size_log_sd = 0.8;
    std::vector<ActivityShock> shocks;

    void validate() const;  // throws ConfigError
};

struct SimTruth {
    std::vector<Instant> jump_times;
    std::vector<double> jump_sizes;
    std::vector<std::size_t> jump_ticks;  // first tick carrying each jump
    double sigma2T = 0.0;
    double q2 = 0.0;
    std::vector<double> latent;           // efficient log-price at each tick
};

struct SimDay {
    DaySeries series;
    std::vector<TickTrade> ticks;
    SimTruth truth;
    bool has_jump() const { return !truth.jump_sizes.empty(); }
};

// Ticks at t_i = i·T/n. Deterministic for a given scenario, seed included.
SimDay simulate_day(const SimScenario& scenario);

struct PanelConfig {
    std::size_t null_days = 0;
    std::size_t jump_days = 0;
    double jump_log_median = 0.02;  // median |Y|
    double jump_log_sd = 0.3;       // log-scale dispersion of |Y|
    double p_positive = 70.0 / 124.0;
    double jump_window_lo = 0.1;    // jump instants drawn uniformly in this
    double jump_window_hi = 0.9;    // fraction of the day
};

// Consecutive days from scenario.date. Jump days are placed at random; each
// day gets its own seed derived from scenario.seed.
std::vector<SimDay> simulate_panel(const SimScenario& scenario, const PanelConfig& panel,
                                   unsigned threads = 1);

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

// Exact two-sided runs-test p-value by enumerating every arrangement; n ≤ 20.
double oracle_runs_pvalue(const std::vector<bool>& flags);

// Columns: date,has_jump,jump_time_us,jump_time,jump_size,jump_tick,sigma2T,q2
// (one line per jump, or one line with empty jump fields for null days)
void write_truth_csv(std::ostream& out, std::span<const SimDay> days);

void from_json(const nlohmann::json& j, SimScenario& s);
void from_json(const nlohmann::json& j, PanelConfig& p);

}  // namespace jumpkit

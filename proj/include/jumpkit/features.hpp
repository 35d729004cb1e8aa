#pragma once

// Per-period covariates aligned to the bar grid.

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "jumpkit/ingest.hpp"
#include "jumpkit/jumptest.hpp"
#include "jumpkit/multiplicity.hpp"
#include "jumpkit/series.hpp"

namespace jumpkit {

struct FeatureRow {
    Instant period_start{};
    int y = 0;       // jump localized in this period
    int y_next = 0;  // jump localized in the next period
    double ms = 0.0;      // median relative spread
    double of = 0.0;      // |buy - sell| aggressive volume, USD
    double wr = 0.0;      // unique passive / unique traders
    double price = 0.0;   // median price, USD
    double rv = 0.0;      // integrated variance, log²
    double nv = 0.0;      // noise variance, log²
    double volume = 0.0;  // USD
    std::size_t n_traders = 0;
    std::size_t trade_count = 0;
    int subperiod = 0;
    bool missing = false;  // some covariate carried forward or y_next unknown
};

struct FeatureConfig {
    Micros bar_width = std::chrono::minutes{5};
    int k = 4;
    double preavg_const = 0.2;
    std::vector<SubPeriod> subperiods = default_subperiods();
};

double order_flow_imbalance(std::span<const TickTrade> ticks);
// Empty for periods without trades.
std::optional<double> whale_index(std::span<const TickTrade> ticks);

struct RvNv {
    double rv = 0.0;
    double nv = 0.0;
};
// Empty when the period holds fewer than 4·k ticks.
std::optional<RvNv> period_rv_nv(std::span<const TickTrade> ticks, int k = 4, double preavg_const = 0.2);

// 1 for every bar whose [start, start+width) overlaps a detection's
// localization window.
std::vector<int> align_jump_flags(std::span<const JumpDetection> rejected,
                                  std::span<const BarRow> bars, Micros width);

std::vector<FeatureRow> build_features(std::span<const TickTrade> ticks,
                                       std::span<const JumpDetection> rejected,
                                       const FeatureConfig& cfg = {});

// Statistics over an arbitrary tick window [first, last).
struct WindowStats {
    std::size_t trade_count = 0;
    double volume = 0.0;
    double abs_order_flow = 0.0;
    std::size_t n_traders = 0;
    std::optional<double> median_spread;
    std::optional<double> median_price;
    std::optional<double> whale;
    std::optional<double> rv;
    std::optional<double> nv;
};

WindowStats window_stats(std::span<const TickTrade> ticks, const QuoteSeries& quotes,
                         std::size_t first, std::size_t last, int k = 4, double preavg_const = 0.2);

// Columns (units): period_start_us, period_start, y, y_next, ms (ratio), of (USD),
// wr (ratio), price (USD), rv (log²), nv (log²), volume (USD), n_traders,
// trade_count, subperiod, missing
void write_features_csv(std::ostream& out, std::span<const FeatureRow> rows);
std::vector<FeatureRow> read_features_csv(std::istream& in);

}  // namespace jumpkit

#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jumpkit/core.hpp"
#include "jumpkit/ingest.hpp"

namespace jumpkit {

// One UTC day of tick-time observations; the unit of jump testing.
struct DaySeries {
    Date date{};
    std::vector<Instant> times;
    std::vector<double> log_prices;
    std::vector<Aggressor> aggressor;
    std::vector<std::string> buyer_ids;
    std::vector<std::string> seller_ids;

    std::size_t n() const { return log_prices.size(); }
};

DaySeries make_day_series(Date date, std::span<const TickTrade> ticks);
// Groups chronologically sorted ticks by UTC calendar day.
std::vector<DaySeries> split_days(std::span<const TickTrade> ticks);

// Best bid/ask reconstructed from aggressor sides. A side is empty until the
// first trade that sets it.
struct QuoteSeries {
    std::vector<std::optional<double>> best_bid;
    std::vector<std::optional<double>> best_ask;

    std::size_t size() const { return best_bid.size(); }
    // (ask - bid) / mid, or empty when either side is unset.
    std::optional<double> relative_spread(std::size_t i) const;
};

QuoteSeries build_quotes(std::span<const TickTrade> ticks);

struct BarRow {
    Instant period_start{};
    double median_price = 0.0;
    double volume = 0.0;
    std::size_t trade_count = 0;
    std::size_t unique_traders = 0;
    std::size_t unique_passive_traders = 0;
    double buy_volume = 0.0;   // buyer-initiated fiat
    double sell_volume = 0.0;  // seller-initiated fiat
    double median_rel_spread = 0.0;
    bool has_spread = false;   // false: spread carried forward (or 0 before the first quote)
    int jump_flag = 0;

    bool empty() const { return trade_count == 0; }
};

// Bars of `width` from the bar containing the first tick to the bar containing
// the last. Empty bars carry the previous median price.
std::vector<BarRow> build_bars(std::span<const TickTrade> ticks, const QuoteSeries& quotes,
                               Micros width = std::chrono::minutes{5});

// Index range [first, last) of ticks with exec_time in [from, to).
std::pair<std::size_t, std::size_t> tick_range(std::span<const TickTrade> ticks, Instant from,
                                               Instant to);

// Columns: period_start_us,period_start,median_price,volume,buy_volume,sell_volume,
// trade_count,unique_traders,unique_passive_traders,median_rel_spread,jump_flag
void write_bars_csv(std::ostream& out, std::span<const BarRow> bars);

}  // namespace jumpkit

#include "jumpkit/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

#include "jumpkit/stats.hpp"

namespace jumpkit {

DaySeries make_day_series(Date date, std::span<const TickTrade> ticks) {
    DaySeries d;
    d.date = date;
    d.times.reserve(ticks.size());
    d.log_prices.reserve(ticks.size());
    d.aggressor.reserve(ticks.size());
    d.buyer_ids.reserve(ticks.size());
    d.seller_ids.reserve(ticks.size());
    for (const auto& t : ticks) {
        if (!d.times.empty() && t.exec_time <= d.times.back()) {
            throw DataError("day series times must be strictly ascending");
        }
        d.times.push_back(t.exec_time);
        d.log_prices.push_back(std::log(t.price));
        d.aggressor.push_back(t.aggressor);
        d.buyer_ids.push_back(t.buyer_id);
        d.seller_ids.push_back(t.seller_id);
    }
    return d;
}

std::vector<DaySeries> split_days(std::span<const TickTrade> ticks) {
    std::vector<DaySeries> days;
    std::size_t start = 0;
    while (start < ticks.size()) {
        const Date d = day_of(ticks[start].exec_time);
        std::size_t end = start;
        while (end < ticks.size() && day_of(ticks[end].exec_time) == d) ++end;
        days.push_back(make_day_series(d, ticks.subspan(start, end - start)));
        start = end;
    }
    return days;
}

std::optional<double> QuoteSeries::relative_spread(std::size_t i) const {
    if (!best_bid[i] || !best_ask[i]) return std::nullopt;
    const double bid = *best_bid[i];
    const double ask = *best_ask[i];
    return (ask - bid) / (0.5 * (ask + bid));
}

QuoteSeries build_quotes(std::span<const TickTrade> ticks) {
    QuoteSeries q;
    q.best_bid.reserve(ticks.size());
    q.best_ask.reserve(ticks.size());
    std::optional<double> bid;
    std::optional<double> ask;
    for (const auto& t : ticks) {
        if (t.aggressor == Aggressor::ask) {
            // Seller hit the bid.
            bid = t.price;
            if (ask && *ask < *bid) ask = bid;
        } else {
            ask = t.price;
            if (bid && *bid > *ask) bid = ask;
        }
        q.best_bid.push_back(bid);
        q.best_ask.push_back(ask);
    }
    return q;
}

std::pair<std::size_t, std::size_t> tick_range(std::span<const TickTrade> ticks, Instant from,
                                               Instant to) {
    auto by_time = [](const TickTrade& t, Instant v) { return t.exec_time < v; };
    const auto first = std::lower_bound(ticks.begin(), ticks.end(), from, by_time);
    const auto last = std::lower_bound(first, ticks.end(), to, by_time);
    return {static_cast<std::size_t>(first - ticks.begin()),
            static_cast<std::size_t>(last - ticks.begin())};
}

std::vector<BarRow> build_bars(std::span<const TickTrade> ticks, const QuoteSeries& quotes,
                               Micros width) {
    if (width.count() <= 0 || std::chrono::days{1} % width != Micros{0}) {
        throw std::invalid_argument("bar width must divide 24 hours");
    }
    if (quotes.size() != ticks.size()) throw std::invalid_argument("quote series length mismatch");
    std::vector<BarRow> bars;
    if (ticks.empty()) return bars;

    const Instant first = std::chrono::floor<Micros>(ticks.front().exec_time);
    const Instant grid0 = day_start(day_of(first)) +
                          ((first - day_start(day_of(first))) / width) * width;
    const auto nbars = static_cast<std::size_t>((ticks.back().exec_time - grid0) / width) + 1;
    bars.reserve(nbars);

    double last_price = ticks.front().price;
    double last_spread = 0.0;
    std::size_t i = 0;
    std::vector<double> prices;
    std::vector<double> spreads;
    std::unordered_set<std::string> traders;
    std::unordered_set<std::string> passive;
    for (std::size_t b = 0; b < nbars; ++b) {
        BarRow bar;
        bar.period_start = grid0 + static_cast<long long>(b) * width;
        const Instant end = bar.period_start + width;
        prices.clear();
        spreads.clear();
        traders.clear();
        passive.clear();
        for (; i < ticks.size() && ticks[i].exec_time < end; ++i) {
            const auto& t = ticks[i];
            prices.push_back(t.price);
            if (t.aggressor == Aggressor::bid) {
                bar.buy_volume += t.fiat_amount;
                passive.insert(t.seller_id);
            } else {
                bar.sell_volume += t.fiat_amount;
                passive.insert(t.buyer_id);
            }
            traders.insert(t.buyer_id);
            traders.insert(t.seller_id);
            if (auto s = quotes.relative_spread(i)) spreads.push_back(*s);
        }
        bar.volume = bar.buy_volume + bar.sell_volume;
        bar.trade_count = prices.size();
        bar.unique_traders = traders.size();
        bar.unique_passive_traders = passive.size();
        if (!prices.empty()) last_price = stats::median(prices);
        bar.median_price = last_price;
        if (!spreads.empty()) {
            last_spread = stats::median(spreads);
            bar.has_spread = true;
        }
        bar.median_rel_spread = last_spread;
        bars.push_back(bar);
    }
    return bars;
}

void write_bars_csv(std::ostream& out, std::span<const BarRow> bars) {
    out << "period_start_us,period_start,median_price,volume,buy_volume,sell_volume,trade_count,"
           "unique_traders,unique_passive_traders,median_rel_spread,jump_flag\n";
    char buf[256];
    for (const auto& b : bars) {
        std::snprintf(buf, sizeof buf, "%lld,%s,%.17g,%.17g,%.17g,%.17g,%zu,%zu,%zu,%.17g,%d\n",
                      static_cast<long long>(to_micros(b.period_start)),
                      format_instant(b.period_start).c_str(), b.median_price, b.volume,
                      b.buy_volume, b.sell_volume, b.trade_count, b.unique_traders,
                      b.unique_passive_traders, b.median_rel_spread, b.jump_flag);
        out << buf;
    }
}

}  // namespace jumpkit

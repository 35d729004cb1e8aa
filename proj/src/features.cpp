#include "jumpkit/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_set>

#include "jumpkit/estimators.hpp"
#include "jumpkit/stats.hpp"

namespace jumpkit {

double order_flow_imbalance(std::span<const TickTrade> ticks) {
    double buy = 0.0;
    double sell = 0.0;
    for (const auto& t : ticks) (t.aggressor == Aggressor::bid ? buy : sell) += t.fiat_amount;
    return std::abs(buy - sell);
}

std::optional<double> whale_index(std::span<const TickTrade> ticks) {
    if (ticks.empty()) return std::nullopt;
    std::unordered_set<std::string> all;
    std::unordered_set<std::string> passive;
    for (const auto& t : ticks) {
        all.insert(t.buyer_id);
        all.insert(t.seller_id);
        passive.insert(t.aggressor == Aggressor::bid ? t.seller_id : t.buyer_id);
    }
    return static_cast<double>(passive.size()) / static_cast<double>(all.size());
}

std::optional<RvNv> period_rv_nv(std::span<const TickTrade> ticks, int k, double preavg_const) {
    if (ticks.size() < static_cast<std::size_t>(4 * k)) return std::nullopt;
    std::vector<double> lp(ticks.size());
    std::transform(ticks.begin(), ticks.end(), lp.begin(),
                   [](const TickTrade& t) { return std::log(t.price); });
    RvNv out;
    out.nv = noise_variance(lp, k).q2;
    out.rv = robust_volatility(lp, k, preavg_const, 4).sigma2T;
    return out;
}

std::vector<int> align_jump_flags(std::span<const JumpDetection> rejected,
                                  std::span<const BarRow> bars, Micros width) {
    std::vector<int> flags(bars.size(), 0);
    for (const auto& d : rejected) {
        auto first = std::lower_bound(bars.begin(), bars.end(), d.loc_start,
                                      [&](const BarRow& b, Instant t) { return b.period_start + width <= t; });
        for (auto it = first; it != bars.end() && it->period_start <= d.loc_end; ++it) {
            flags[static_cast<std::size_t>(it - bars.begin())] = 1;
        }
    }
    return flags;
}

std::vector<FeatureRow> build_features(std::span<const TickTrade> ticks,
                                       std::span<const JumpDetection> rejected,
                                       const FeatureConfig& cfg) {
    const auto quotes = build_quotes(ticks);
    const auto bars = build_bars(ticks, quotes, cfg.bar_width);
    const auto flags = align_jump_flags(rejected, bars, cfg.bar_width);

    std::vector<FeatureRow> rows;
    rows.reserve(bars.size());
    std::optional<double> last_wr;
    std::optional<RvNv> last_rvnv;
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < bars.size(); ++i) {
        const auto& bar = bars[i];
        const std::size_t first = cursor;
        while (cursor < ticks.size() && ticks[cursor].exec_time < bar.period_start + cfg.bar_width) ++cursor;
        const auto period = ticks.subspan(first, cursor - first);

        FeatureRow r;
        r.period_start = bar.period_start;
        r.y = flags[i];
        r.y_next = i + 1 < bars.size() ? flags[i + 1] : 0;
        r.missing = i + 1 >= bars.size() || !bar.has_spread;
        r.ms = bar.median_rel_spread;
        r.of = std::abs(bar.buy_volume - bar.sell_volume);
        r.price = bar.median_price;
        r.volume = bar.volume;
        r.n_traders = bar.unique_traders;
        r.trade_count = bar.trade_count;
        r.subperiod = subperiod_of(day_of(bar.period_start), cfg.subperiods);

        if (auto wr = whale_index(period)) {
            last_wr = wr;
        } else {
            r.missing = true;
        }
        r.wr = last_wr.value_or(0.0);
        if (auto rvnv = period_rv_nv(period, cfg.k, cfg.preavg_const)) {
            last_rvnv = rvnv;
        } else {
            r.missing = true;
        }
        r.rv = last_rvnv ? last_rvnv->rv : 0.0;
        r.nv = last_rvnv ? last_rvnv->nv : 0.0;
        rows.push_back(r);
    }
    return rows;
}

WindowStats window_stats(std::span<const TickTrade> ticks, const QuoteSeries& quotes,
                         std::size_t first, std::size_t last, int k, double preavg_const) {
    WindowStats w;
    const auto period = ticks.subspan(first, last - first);
    w.trade_count = period.size();
    std::unordered_set<std::string> traders;
    std::vector<double> prices;
    std::vector<double> spreads;
    for (std::size_t i = first; i < last; ++i) {
        const auto& t = ticks[i];
        w.volume += t.fiat_amount;
        traders.insert(t.buyer_id);
        traders.insert(t.seller_id);
        prices.push_back(t.price);
        if (auto s = quotes.relative_spread(i)) spreads.push_back(*s);
    }
    w.abs_order_flow = order_flow_imbalance(period);
    w.n_traders = traders.size();
    if (!prices.empty()) w.median_price = stats::median(prices);
    if (!spreads.empty()) w.median_spread = stats::median(spreads);
    w.whale = whale_index(period);
    if (auto rvnv = period_rv_nv(period, k, preavg_const)) {
        w.rv = rvnv->rv;
        w.nv = rvnv->nv;
    }
    return w;
}

void write_features_csv(std::ostream& out, std::span<const FeatureRow> rows) {
    out << "period_start_us,period_start,y,y_next,ms,of,wr,price,rv,nv,volume,n_traders,"
           "trade_count,subperiod,missing\n";
    char buf[512];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf,
                      "%lld,%s,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%zu,%zu,%d,%d\n",
                      static_cast<long long>(to_micros(r.period_start)),
                      format_instant(r.period_start).c_str(), r.y, r.y_next, r.ms, r.of, r.wr,
                      r.price, r.rv, r.nv, r.volume, r.n_traders, r.trade_count, r.subperiod,
                      r.missing ? 1 : 0);
        out << buf;
    }
}

std::vector<FeatureRow> read_features_csv(std::istream& in) {
    std::vector<FeatureRow> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 && line.rfind("period_start_us", 0) == 0) continue;
        if (line.empty()) continue;
        const auto c = split_csv_line(line);
        if (c.size() != 15) throw DataError("feature file line " + std::to_string(lineno) + ": expected 15 fields");
        try {
            FeatureRow r;
            r.period_start = from_micros(std::stoll(c[0]));
            r.y = std::stoi(c[2]);
            r.y_next = std::stoi(c[3]);
            r.ms = std::stod(c[4]);
            r.of = std::stod(c[5]);
            r.wr = std::stod(c[6]);
            r.price = std::stod(c[7]);
            r.rv = std::stod(c[8]);
            r.nv = std::stod(c[9]);
            r.volume = std::stod(c[10]);
            r.n_traders = std::stoull(c[11]);
            r.trade_count = std::stoull(c[12]);
            r.subperiod = std::stoi(c[13]);
            r.missing = c[14] == "1";
            rows.push_back(r);
        } catch (const std::logic_error&) {
            throw DataError("feature file line " + std::to_string(lineno) + ": bad number");
        }
    }
    return rows;
}

}  // namespace jumpkit

#include "jumpkit/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "jumpkit/stats.hpp"

namespace jumpkit {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<bool> parse_flag(std::string_view s) {
    const std::string v = lower(trim(s));
    if (v.empty()) return std::nullopt;
    if (v == "1" || v == "true" || v == "yes" || v == "y" || v == "t") return true;
    if (v == "0" || v == "false" || v == "no" || v == "n" || v == "f") return false;
    return std::nullopt;
}

std::optional<Side> parse_side(std::string_view s) {
    const std::string v = lower(trim(s));
    if (v == "buy" || v == "bid" || v == "b") return Side::buy;
    if (v == "sell" || v == "ask" || v == "s") return Side::sell;
    return std::nullopt;
}

std::string canonical_row(const RawTradeRow& r) {
    if (!r.raw.empty()) return r.raw;
    char buf[160];
    std::snprintf(buf, sizeof buf, "|%d|%.17g|%.17g|%.17g|%.17g|%d",
                  r.side == Side::buy ? 0 : 1, r.fiat_amount, r.btc_amount, r.fiat_fee,
                  r.btc_fee, r.initiator ? (*r.initiator ? 1 : 0) : -1);
    return r.timestamp_text + "|" + r.trade_id + "|" + r.user_id + "|" + r.currency + buf;
}

std::optional<Aggressor> aggressor_from_flags(const LegPair& rec) {
    const auto& b = rec.buy.initiator;
    const auto& s = rec.sell.initiator;
    if (b && s) {
        if (*b && !*s) return Aggressor::bid;
        if (*s && !*b) return Aggressor::ask;
        return std::nullopt;  // contradictory flags
    }
    if (b) return *b ? Aggressor::bid : Aggressor::ask;
    if (s) return *s ? Aggressor::ask : Aggressor::bid;
    return std::nullopt;
}

}  // namespace

void to_json(nlohmann::json& j, const CleaningReport& r) {
    j = nlohmann::json{{"input_rows", r.input_rows},
                       {"duplicate", r.duplicate},
                       {"records", r.records},
                       {"missing_leg", r.missing_leg},
                       {"self_trade", r.self_trade},
                       {"malformed", r.malformed},
                       {"non_usd", r.non_usd},
                       {"sub_minimum_fiat", r.sub_minimum_fiat},
                       {"zero_or_extreme_price", r.zero_or_extreme_price},
                       {"outside_band", r.outside_band},
                       {"bounceback", r.bounceback},
                       {"accepted", r.accepted}};
}

void from_json(const nlohmann::json& j, CleaningReport& r) {
    r.input_rows = j.at("input_rows").get<std::size_t>();
    r.duplicate = j.at("duplicate").get<std::size_t>();
    r.records = j.at("records").get<std::size_t>();
    r.missing_leg = j.at("missing_leg").get<std::size_t>();
    r.self_trade = j.at("self_trade").get<std::size_t>();
    r.malformed = j.at("malformed").get<std::size_t>();
    r.non_usd = j.at("non_usd").get<std::size_t>();
    r.sub_minimum_fiat = j.at("sub_minimum_fiat").get<std::size_t>();
    r.zero_or_extreme_price = j.at("zero_or_extreme_price").get<std::size_t>();
    r.outside_band = j.at("outside_band").get<std::size_t>();
    r.bounceback = j.at("bounceback").get<std::size_t>();
    r.accepted = j.at("accepted").get<std::size_t>();
}

Instant parse_trade_id(std::string_view trade_id) {
    if (!all_digits(trade_id)) {
        throw MalformedTradeId("trade id is not all digits: '" + std::string(trade_id) + "'");
    }
    if (trade_id.size() < 11) {
        throw MalformedTradeId("trade id shorter than 11 digits: '" + std::string(trade_id) + "'");
    }
    // The digit string read as one integer is the microsecond count since the epoch.
    std::int64_t us = 0;
    auto [ptr, ec] = std::from_chars(trade_id.data(), trade_id.data() + trade_id.size(), us);
    if (ec != std::errc{} || ptr != trade_id.data() + trade_id.size()) {
        throw MalformedTradeId("trade id out of range: '" + std::string(trade_id) + "'");
    }
    return from_micros(us);
}

AggregateResult aggregate_legs(std::span<const RawTradeRow> rows) {
    AggregateResult out;
    out.report.input_rows = rows.size();

    struct Slot {
        std::optional<RawTradeRow> buy;
        std::optional<RawTradeRow> sell;
    };
    std::unordered_set<std::string> seen_rows;
    std::unordered_map<std::string, std::size_t> index;
    std::vector<std::pair<std::string, Slot>> slots;

    for (const auto& row : rows) {
        if (!seen_rows.insert(canonical_row(row)).second) {
            ++out.report.duplicate;
            continue;
        }
        auto [it, inserted] = index.try_emplace(row.trade_id, slots.size());
        if (inserted) slots.emplace_back(row.trade_id, Slot{});
        Slot& slot = slots[it->second].second;
        auto& leg = row.side == Side::buy ? slot.buy : slot.sell;
        if (leg) {
            ++out.report.duplicate;
            continue;
        }
        leg = row;
    }

    out.report.records = slots.size();
    for (auto& [id, slot] : slots) {
        if (!slot.buy || !slot.sell) {
            ++out.report.missing_leg;
            continue;
        }
        if (slot.buy->user_id == slot.sell->user_id) {
            ++out.report.self_trade;
            continue;
        }
        out.records.push_back(LegPair{id, std::move(*slot.buy), std::move(*slot.sell)});
    }
    out.report.accepted = out.records.size();
    return out;
}

double round_price(double price) { return std::round(price * 1000.0) / 1000.0; }

CleanResult clean_trades(std::span<const LegPair> records, const DailyBands& bands,
                         const CleanConfig& cfg) {
    CleanResult out;
    out.report.records = records.size();

    struct Pending {
        TickTrade tick;
        std::optional<Aggressor> aggressor;
    };
    std::vector<Pending> kept;
    kept.reserve(records.size());

    for (const auto& rec : records) {
        Instant t{};
        std::uint64_t id = 0;
        try {
            t = parse_trade_id(rec.trade_id);
            id = static_cast<std::uint64_t>(to_micros(t));
        } catch (const MalformedTradeId&) {
            ++out.report.malformed;
            continue;
        }
        const double fiat = rec.buy.fiat_amount;
        const double btc = rec.buy.btc_amount;
        if (!std::isfinite(fiat) || !std::isfinite(btc) || btc <= 0.0) {
            ++out.report.malformed;
            continue;
        }
        if (lower(rec.buy.currency) != "usd" || lower(rec.sell.currency) != "usd") {
            ++out.report.non_usd;
            continue;
        }
        if (fiat < cfg.min_fiat) {
            ++out.report.sub_minimum_fiat;
            continue;
        }
        const double price = round_price(fiat / btc);
        if (price <= 0.0 || price > cfg.max_price) {
            ++out.report.zero_or_extreme_price;
            continue;
        }
        if (auto it = bands.find(day_of(t)); it != bands.end()) {
            const double lo = it->second.low * (1.0 - cfg.band_margin);
            const double hi = it->second.high * (1.0 + cfg.band_margin);
            if (price < lo || price > hi) {
                ++out.report.outside_band;
                continue;
            }
        }
        TickTrade tick;
        tick.exec_time = t;
        tick.trade_id = id;
        tick.buyer_id = rec.buy.user_id;
        tick.seller_id = rec.sell.user_id;
        tick.price = price;
        tick.fiat_amount = fiat;
        tick.btc_amount = btc;
        kept.push_back(Pending{std::move(tick), aggressor_from_flags(rec)});
    }

    std::sort(kept.begin(), kept.end(), [](const Pending& a, const Pending& b) {
        if (a.tick.exec_time != b.tick.exec_time) return a.tick.exec_time < b.tick.exec_time;
        return a.tick.trade_id < b.tick.trade_id;
    });

    // Tick rule for trades without initiator flags: upticks are buyer-initiated,
    // downticks seller-initiated, zero ticks inherit the previous classification.
    Aggressor last = Aggressor::bid;
    double last_price = 0.0;
    out.ticks.reserve(kept.size());
    for (auto& p : kept) {
        if (p.aggressor) {
            p.tick.aggressor = *p.aggressor;
        } else if (last_price > 0.0 && p.tick.price > last_price) {
            p.tick.aggressor = Aggressor::bid;
        } else if (last_price > 0.0 && p.tick.price < last_price) {
            p.tick.aggressor = Aggressor::ask;
        } else {
            p.tick.aggressor = last;
        }
        last = p.tick.aggressor;
        last_price = p.tick.price;
        out.ticks.push_back(std::move(p.tick));
    }
    out.report.accepted = out.ticks.size();
    return out;
}

FilterResult filter_bouncebacks(std::span<const TickTrade> ticks, const BouncebackConfig& cfg) {
    const std::size_t n = ticks.size();
    std::vector<double> r(n, 0.0);  // r[i] = log(p_i / p_{i-1})
    for (std::size_t i = 1; i < n; ++i) r[i] = std::log(ticks[i].price / ticks[i - 1].price);

    std::vector<bool> drop(n, false);
    std::vector<double> window;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double ri = r[i];
        if (ri == 0.0) continue;
        if (std::abs(ri + r[i + 1]) > cfg.reversion_tol * std::abs(ri)) continue;

        window.clear();
        const std::size_t lo = i > cfg.window ? i - cfg.window : 1;
        const std::size_t hi = std::min(n - 1, i + 1 + cfg.window);
        for (std::size_t j = lo; j <= hi; ++j) {
            if (j != i && j != i + 1) window.push_back(r[j]);
        }
        double scale = cfg.min_scale;
        if (!window.empty()) {
            const double med = stats::median(window);
            for (double& v : window) v = std::abs(v - med);
            scale = std::max(scale, stats::median(window));
        }
        if (std::abs(ri) > cfg.threshold_mads * scale) drop[i] = true;
    }

    FilterResult out;
    out.ticks.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (drop[i]) {
            ++out.removed;
        } else {
            out.ticks.push_back(ticks[i]);
        }
    }
    return out;
}

IngestResult ingest_rows(std::span<const RawTradeRow> rows, const DailyBands& bands,
                         const CleanConfig& clean, const BouncebackConfig& bounce) {
    auto agg = aggregate_legs(rows);
    auto cleaned = clean_trades(agg.records, bands, clean);
    auto filtered = filter_bouncebacks(cleaned.ticks, bounce);

    IngestResult out;
    out.report = agg.report;
    out.report.malformed = cleaned.report.malformed;
    out.report.non_usd = cleaned.report.non_usd;
    out.report.sub_minimum_fiat = cleaned.report.sub_minimum_fiat;
    out.report.zero_or_extreme_price = cleaned.report.zero_or_extreme_price;
    out.report.outside_band = cleaned.report.outside_band;
    out.report.bounceback = filtered.removed;
    out.report.accepted = filtered.ticks.size();
    out.ticks = std::move(filtered.ticks);
    return out;
}

// --- file formats -------------------------------------------------------

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    cells.push_back(std::move(cur));
    return cells;
}

ColumnMap ColumnMap::from_header(std::span<const std::string> header) {
    ColumnMap m;
    for (int i = 0; i < static_cast<int>(header.size()); ++i) {
        const std::string h = lower(trim(header[static_cast<std::size_t>(i)]));
        if (h == "date" || h == "timestamp" || h == "time") m.timestamp = i;
        else if (h == "trade_id" || h == "tid" || h == "trade") m.trade_id = i;
        else if (h == "user_id" || h == "user" || h == "uid") m.user_id = i;
        else if (h == "type" || h == "side") m.side = i;
        else if (h == "currency") m.currency = i;
        else if (h == "fiat_amount" || h == "fiat" || h == "amount_fiat") m.fiat_amount = i;
        else if (h == "btc_amount" || h == "bitcoins" || h == "btc" || h == "amount_btc") m.btc_amount = i;
        else if (h == "fiat_fee") m.fiat_fee = i;
        else if (h == "btc_fee" || h == "bitcoin_fee") m.btc_fee = i;
        else if (h == "initiator" || h == "primary" || h == "aggressor") m.initiator = i;
    }
    return m;
}

RawReadResult read_raw_trades(std::istream& in, const std::optional<ColumnMap>& columns) {
    RawReadResult out;
    ColumnMap map = columns.value_or(ColumnMap{});
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto cells = split_csv_line(line);
        if (first) {
            first = false;
            const auto tid = static_cast<std::size_t>(map.trade_id);
            if (tid >= cells.size() || !all_digits(trim(cells[tid]))) {
                out.had_header = true;
                if (!columns) map = ColumnMap::from_header(cells);
                continue;
            }
        }
        auto cell = [&](int idx) -> std::string_view {
            if (idx < 0 || static_cast<std::size_t>(idx) >= cells.size()) return {};
            return trim(cells[static_cast<std::size_t>(idx)]);
        };
        RawTradeRow row;
        row.timestamp_text = std::string(cell(map.timestamp));
        row.trade_id = std::string(cell(map.trade_id));
        row.user_id = std::string(cell(map.user_id));
        row.currency = std::string(cell(map.currency));
        const auto side = parse_side(cell(map.side));
        const auto fiat = parse_double(cell(map.fiat_amount));
        const auto btc = parse_double(cell(map.btc_amount));
        if (!side || !fiat || !btc || row.trade_id.empty()) {
            ++out.unparseable;
            continue;
        }
        row.side = *side;
        row.fiat_amount = *fiat;
        row.btc_amount = *btc;
        row.fiat_fee = parse_double(cell(map.fiat_fee)).value_or(0.0);
        row.btc_fee = parse_double(cell(map.btc_fee)).value_or(0.0);
        if (map.initiator >= 0) row.initiator = parse_flag(cell(map.initiator));
        row.raw = line;
        if (!row.raw.empty() && row.raw.back() == '\r') row.raw.pop_back();
        out.rows.push_back(std::move(row));
    }
    return out;
}

DailyBands read_daily_bands(std::istream& in) {
    DailyBands bands;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() < 3) throw DataError("band file line " + std::to_string(lineno) + ": expected date,low,high");
        const auto lo = parse_double(cells[1]);
        const auto hi = parse_double(cells[2]);
        if (!lo || !hi) {
            if (lineno == 1) continue;  // header
            throw DataError("band file line " + std::to_string(lineno) + ": bad number");
        }
        if (*lo > *hi) throw DataError("band file line " + std::to_string(lineno) + ": low > high");
        bands[parse_date(trim(cells[0]))] = PriceBand{*lo, *hi};
    }
    return bands;
}

void write_ticks_csv(std::ostream& out, std::span<const TickTrade> ticks) {
    out << "exec_time_us,trade_id,buyer_id,seller_id,aggressor,price,fiat_amount,btc_amount\n";
    char buf[128];
    for (const auto& t : ticks) {
        out << to_micros(t.exec_time) << ',' << t.trade_id << ',' << t.buyer_id << ','
            << t.seller_id << ',' << (t.aggressor == Aggressor::bid ? "bid" : "ask") << ',';
        std::snprintf(buf, sizeof buf, "%.3f,%.17g,%.17g\n", t.price, t.fiat_amount, t.btc_amount);
        out << buf;
    }
}

std::vector<TickTrade> read_ticks_csv(std::istream& in) {
    std::vector<TickTrade> ticks;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 && line.rfind("exec_time_us", 0) == 0) continue;
        if (trim(line).empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != 8) throw DataError("tick file line " + std::to_string(lineno) + ": expected 8 fields");
        TickTrade t;
        std::int64_t us = 0;
        auto r1 = std::from_chars(cells[0].data(), cells[0].data() + cells[0].size(), us);
        auto r2 = std::from_chars(cells[1].data(), cells[1].data() + cells[1].size(), t.trade_id);
        const auto price = parse_double(cells[5]);
        const auto fiat = parse_double(cells[6]);
        const auto btc = parse_double(cells[7]);
        if (r1.ec != std::errc{} || r2.ec != std::errc{} || !price || !fiat || !btc ||
            (cells[4] != "bid" && cells[4] != "ask")) {
            throw DataError("tick file line " + std::to_string(lineno) + ": bad field");
        }
        t.exec_time = from_micros(us);
        t.buyer_id = cells[2];
        t.seller_id = cells[3];
        t.aggressor = cells[4] == "bid" ? Aggressor::bid : Aggressor::ask;
        t.price = *price;
        t.fiat_amount = *fiat;
        t.btc_amount = *btc;
        ticks.push_back(std::move(t));
    }
    return ticks;
}

}  // namespace jumpkit

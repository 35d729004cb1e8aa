#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "jumpkit/ingest.hpp"

using namespace jumpkit;
using namespace std::chrono;

namespace {

RawTradeRow leg(std::string id, std::string user, Side side, double fiat = 100.0, double btc = 10.0,
                std::string ccy = "USD") {
    RawTradeRow r;
    r.timestamp_text = "2011-06-28 00:12:00";
    r.trade_id = std::move(id);
    r.user_id = std::move(user);
    r.side = side;
    r.currency = std::move(ccy);
    r.fiat_amount = fiat;
    r.btc_amount = btc;
    return r;
}

TickTrade tick(std::int64_t us, double price) {
    TickTrade t;
    t.exec_time = from_micros(us);
    t.trade_id = static_cast<std::uint64_t>(us);
    t.buyer_id = "a";
    t.seller_id = "b";
    t.price = price;
    t.fiat_amount = 10.0 * price;
    t.btc_amount = 10.0;
    return t;
}

std::vector<TickTrade> series(std::initializer_list<double> prices) {
    std::vector<TickTrade> out;
    std::int64_t us = 1'309'219'920'000'000;
    for (double p : prices) out.push_back(tick(us += 1'000'000, p));
    return out;
}

}  // namespace

TEST(ParseTradeId, SplitsSecondsAndMicros) {
    const auto t = parse_trade_id("1309219920123456");
    EXPECT_EQ(format_instant(t), "2011-06-28T00:12:00.123456Z");
    const auto secs = floor<seconds>(t);
    EXPECT_EQ(secs.time_since_epoch().count(), 1309219920);
    EXPECT_EQ((t - secs).count(), 123456);
}

TEST(ParseTradeId, ZeroMicros) {
    const auto t = parse_trade_id("1000000000000000");
    EXPECT_EQ(to_micros(t), 1'000'000'000'000'000LL);
}

TEST(ParseTradeId, RejectsShortAndNonNumeric) {
    EXPECT_THROW(parse_trade_id("12345"), MalformedTradeId);
    EXPECT_THROW(parse_trade_id("13092199201234x6"), MalformedTradeId);
    EXPECT_THROW(parse_trade_id(""), MalformedTradeId);
    EXPECT_THROW(parse_trade_id("99999999999999999999999"), MalformedTradeId);
}

TEST(ParseTradeId, InjectiveAndMonotone) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::int64_t> secs(1'300'000'000, 1'390'000'000);
    std::uniform_int_distribution<int> micros(0, 999'999);
    for (int i = 0; i < 2000; ++i) {
        const auto s1 = secs(rng), s2 = secs(rng);
        const int m1 = micros(rng), m2 = micros(rng);
        char a[32], b[32];
        std::snprintf(a, sizeof a, "%lld%06d", static_cast<long long>(s1), m1);
        std::snprintf(b, sizeof b, "%lld%06d", static_cast<long long>(s2), m2);
        const auto ta = parse_trade_id(a), tb = parse_trade_id(b);
        if (std::string(a) != b) EXPECT_NE(ta, tb);
        if (s1 < s2) EXPECT_LT(ta, tb);
    }
}

TEST(AggregateLegs, PairsBuyAndSell) {
    std::vector<RawTradeRow> rows{leg("1309219920000007", "A", Side::buy), leg("1309219920000007", "B", Side::sell)};
    const auto r = aggregate_legs(rows);
    ASSERT_EQ(r.records.size(), 1u);
    EXPECT_EQ(r.records[0].buy.user_id, "A");
    EXPECT_EQ(r.records[0].sell.user_id, "B");
    EXPECT_EQ(r.report.missing_leg, 0u);
}

TEST(AggregateLegs, MissingLegAndSelfTrade) {
    std::vector<RawTradeRow> rows{leg("1309219920000008", "A", Side::buy), leg("1309219920000009", "A", Side::buy),
                                  leg("1309219920000009", "A", Side::sell)};
    const auto r = aggregate_legs(rows);
    EXPECT_TRUE(r.records.empty());
    EXPECT_EQ(r.report.missing_leg, 1u);
    EXPECT_EQ(r.report.self_trade, 1u);
    EXPECT_TRUE(r.report.conserved());
}

TEST(AggregateLegs, DuplicatesFirstWins) {
    auto a = leg("1309219920000010", "A", Side::buy, 50.0, 5.0);
    auto a2 = leg("1309219920000010", "C", Side::buy, 70.0, 5.0);  // same (id, side)
    std::vector<RawTradeRow> rows{a, a, a2, leg("1309219920000010", "B", Side::sell, 50.0, 5.0)};
    const auto r = aggregate_legs(rows);
    ASSERT_EQ(r.records.size(), 1u);
    EXPECT_EQ(r.report.duplicate, 2u);
    EXPECT_EQ(r.records[0].buy.user_id, "A");
}

TEST(CleanTrades, PriceAndFilters) {
    std::vector<LegPair> recs;
    auto pair = [&](std::string id, double fiat, double btc, std::string ccy = "USD") {
        recs.push_back(LegPair{id, leg(id, "A", Side::buy, fiat, btc, ccy), leg(id, "B", Side::sell, fiat, btc, ccy)});
    };
    pair("1309219920000001", 101.23, 10.0);
    pair("1309219920000002", 0.05, 0.001);
    pair("1309219920000003", 12000.0, 1.0);
    pair("1309219920000004", 100.0, 10.0, "EUR");
    pair("1309219920000005", 0.0, 0.0);
    const auto r = clean_trades(recs);
    ASSERT_EQ(r.ticks.size(), 1u);
    EXPECT_DOUBLE_EQ(r.ticks[0].price, 10.123);
    EXPECT_EQ(r.report.sub_minimum_fiat, 1u);
    EXPECT_EQ(r.report.zero_or_extreme_price, 1u);
    EXPECT_EQ(r.report.non_usd, 1u);
    EXPECT_EQ(r.report.malformed, 1u);
}

TEST(CleanTrades, BandFilterOnlyOnListedDays) {
    std::vector<LegPair> recs;
    for (auto [id, fiat] : {std::pair{"1309219920000001", 130.0}, std::pair{"1309219920000002", 125.0},
                            std::pair{"1309306320000003", 500.0}}) {
        recs.push_back(LegPair{id, leg(id, "A", Side::buy, fiat, 10.0), leg(id, "B", Side::sell, fiat, 10.0)});
    }
    DailyBands bands;
    bands[day_of(parse_trade_id("1309219920000001"))] = PriceBand{9.0, 10.5};
    const auto r = clean_trades(recs, bands);
    EXPECT_EQ(r.report.outside_band, 1u);  // 13.0 > 10.5·1.2; 12.5 is inside
    ASSERT_EQ(r.ticks.size(), 2u);
    EXPECT_DOUBLE_EQ(r.ticks[1].price, 50.0);
}

TEST(CleanTrades, InitiatorFlagsAndTickRule) {
    std::vector<LegPair> recs;
    auto add = [&](std::string id, double fiat, std::optional<bool> buyer_init) {
        auto b = leg(id, "A", Side::buy, fiat, 1.0);
        auto s = leg(id, "B", Side::sell, fiat, 1.0);
        b.initiator = buyer_init;
        recs.push_back(LegPair{id, b, s});
    };
    add("1309219920000001", 10.0, false);
    add("1309219920000002", 11.0, std::nullopt);
    add("1309219920000003", 10.5, std::nullopt);
    add("1309219920000004", 10.5, std::nullopt);
    const auto r = clean_trades(recs);
    ASSERT_EQ(r.ticks.size(), 4u);
    EXPECT_EQ(r.ticks[0].aggressor, Aggressor::ask);
    EXPECT_EQ(r.ticks[1].aggressor, Aggressor::bid);
    EXPECT_EQ(r.ticks[2].aggressor, Aggressor::ask);
    EXPECT_EQ(r.ticks[3].aggressor, Aggressor::ask);
}

TEST(Bouncebacks, FlatUnchanged) {
    const auto s = series({10.0, 10.0, 10.0, 10.0, 10.0, 10.0});
    const auto r = filter_bouncebacks(s);
    EXPECT_EQ(r.removed, 0u);
    EXPECT_EQ(r.ticks.size(), s.size());
}

TEST(Bouncebacks, IsolatedSpikeRemoved) {
    const auto s = series({10.000, 10.001, 12.000, 10.001, 10.002});
    const auto r = filter_bouncebacks(s);
    ASSERT_EQ(r.removed, 1u);
    for (const auto& t : r.ticks) EXPECT_NE(t.price, 12.0);
}

TEST(Bouncebacks, PersistentShiftKept) {
    const auto s = series({10.0, 10.001, 10.0, 12.0, 12.001, 12.0, 12.002});
    EXPECT_EQ(filter_bouncebacks(s).removed, 0u);
}

TEST(Ingest, RandomRowsConserveAndSatisfyInvariants) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> kind(0, 9);
    std::uniform_real_distribution<double> price(0.5, 300.0);
    std::uniform_real_distribution<double> qty(0.001, 50.0);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<RawTradeRow> rows;
        std::int64_t us = 1'309'219'920'000'000;
        for (int i = 0; i < 400; ++i) {
            us += 1 + static_cast<std::int64_t>(rng() % 5'000'000);
            const std::string id = std::to_string(us);
            const double q = qty(rng);
            double p = price(rng);
            const int k = kind(rng);
            if (k == 0) p = 20000.0;
            std::string ccy = k == 1 ? "JPY" : "USD";
            const std::string seller = k == 2 ? "u1" : "u" + std::to_string(2 + rng() % 30);
            rows.push_back(leg(id, "u1", Side::buy, p * q, q, ccy));
            if (k != 3) rows.push_back(leg(id, seller, Side::sell, p * q, q, ccy));
            if (k == 4) rows.push_back(rows.back());
        }
        std::shuffle(rows.begin(), rows.end(), rng);
        const auto r = ingest_rows(rows);
        EXPECT_TRUE(r.report.conserved());
        EXPECT_EQ(r.report.input_rows, rows.size());
        std::set<std::uint64_t> ids;
        for (std::size_t i = 0; i < r.ticks.size(); ++i) {
            const auto& t = r.ticks[i];
            EXPECT_GT(t.price, 0.0);
            EXPECT_LE(t.price, 10000.0);
            EXPECT_GE(t.fiat_amount, 0.10);
            EXPECT_NE(t.buyer_id, t.seller_id);
            EXPECT_TRUE(ids.insert(t.trade_id).second);
            if (i > 0) {
                const auto& u = r.ticks[i - 1];
                EXPECT_TRUE(u.exec_time < t.exec_time || (u.exec_time == t.exec_time && u.trade_id < t.trade_id));
            }
        }
    }
}

TEST(RawFile, HeaderDetectionAndUnparseable) {
    std::istringstream in(
        "date,tid,user,type,currency,amount_fiat,amount_btc,fee_fiat,fee_btc\n"
        "2011-06-28,1309219920000001,A,buy,USD,100,10,0,0\n"
        "2011-06-28,1309219920000001,B,sell,USD,100,10,0,0\n"
        "2011-06-28,1309219920000002,B,hold,USD,100,10,0,0\n");
    const auto r = read_raw_trades(in);
    EXPECT_TRUE(r.had_header);
    EXPECT_EQ(r.rows.size(), 2u);
    EXPECT_EQ(r.unparseable, 1u);
    const auto ing = ingest_rows(r.rows);
    ASSERT_EQ(ing.ticks.size(), 1u);
    EXPECT_DOUBLE_EQ(ing.ticks[0].price, 10.0);
}

TEST(TickFile, RoundTrip) {
    auto s = series({10.123, 10.5, 11.25});
    s[1].aggressor = Aggressor::ask;
    std::stringstream io;
    write_ticks_csv(io, s);
    const auto back = read_ticks_csv(io);
    ASSERT_EQ(back.size(), s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        EXPECT_EQ(back[i].exec_time, s[i].exec_time);
        EXPECT_EQ(back[i].trade_id, s[i].trade_id);
        EXPECT_EQ(back[i].aggressor, s[i].aggressor);
        EXPECT_DOUBLE_EQ(back[i].price, s[i].price);
        EXPECT_EQ(back[i].fiat_amount, s[i].fiat_amount);
    }
}

TEST(CleaningReport, JsonRoundTrip) {
    CleaningReport r;
    r.input_rows = 10;
    r.records = 4;
    r.accepted = 3;
    r.self_trade = 1;
    const nlohmann::json j = r;
    const auto back = j.get<CleaningReport>();
    EXPECT_EQ(back.accepted, 3u);
    EXPECT_EQ(back.self_trade, 1u);
    EXPECT_TRUE(back.conserved());
}

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "jumpkit/eventstudy.hpp"
#include "jumpkit/simkit.hpp"

using namespace jumpkit;
using namespace std::chrono;

namespace {

const Instant kT0 = from_micros(1'309'219'200'000'000);

std::vector<BarRow> bars_from(const std::vector<double>& prices) {
    std::vector<BarRow> bars(prices.size());
    for (std::size_t i = 0; i < prices.size(); ++i) {
        bars[i].period_start = kT0 + minutes{5} * static_cast<int>(i);
        bars[i].median_price = prices[i];
        bars[i].trade_count = 1;
    }
    return bars;
}

JumpDetection at_bar(std::size_t bar, double size) {
    JumpDetection d;
    d.loc_start = kT0 + minutes{5} * static_cast<int>(bar) + seconds{10};
    d.loc_end = d.loc_start + seconds{60};
    d.jump_size = size;
    return d;
}

JumpWindows window(double size, double ref, std::vector<double> post) {
    JumpWindows w;
    w.jump_size = size;
    for (auto& v : w.reference) v = ref;
    for (double p : post) {
        StatValues s;
        for (auto& v : s) v = p;
        w.spans.push_back(s);
    }
    return w;
}

}  // namespace

TEST(TTest, AllZero) {
    const std::vector<double> z(25, 0.0);
    const auto t = one_sample_ttest(z);
    EXPECT_EQ(t.t, 0.0);
    EXPECT_EQ(t.p, 1.0);
    EXPECT_EQ(t.n, 25u);
}

TEST(TTest, KnownValue) {
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    const auto t = one_sample_ttest(x);
    EXPECT_NEAR(t.t, 2.5 / (std::sqrt(5.0 / 3.0) / 2.0), 1e-12);
    EXPECT_NEAR(t.p, 0.030466291662171, 1e-9);
}

TEST(Impact, LogRatioShift) {
    std::mt19937_64 rng(3);
    std::lognormal_distribution<double> ln(0.0, 0.3);
    std::vector<JumpWindows> base, scaled;
    for (int i = 0; i < 40; ++i) {
        const double ref = ln(rng);
        std::vector<double> post{ln(rng), ln(rng)};
        base.push_back(window(i % 3 ? 0.01 : -0.01, ref, post));
        for (auto& p : post) p *= std::exp(1.0);
        scaled.push_back(window(i % 3 ? 0.01 : -0.01, ref, post));
    }
    const auto a = impact_from_windows(base, 2);
    const auto b = impact_from_windows(scaled, 2);
    for (ImpactStat s : all_impact_stats) {
        for (int span = 0; span < 2; ++span) {
            for (SignGroup g : all_sign_groups) {
                EXPECT_NEAR(b.at(s, span, g).test.mean, a.at(s, span, g).test.mean + 1.0, 1e-12);
            }
        }
    }
}

TEST(Impact, ExcludedPlusTestedIsTotal) {
    std::vector<JumpWindows> w{window(0.01, 1.0, {2.0}), window(-0.02, 0.0, {2.0}), window(0.03, 1.0, {0.0}),
                               window(0.01, 1.0, {1.5})};
    JumpWindows skipped;
    skipped.jump_size = -0.01;
    skipped.skipped = true;
    w.push_back(skipped);
    w[3].reference[static_cast<std::size_t>(ImpactStat::median_spread)].reset();
    const auto r = impact_from_windows(w, 1);
    EXPECT_EQ(r.detections[0], 5u);
    EXPECT_EQ(r.skipped[0], 1u);
    EXPECT_EQ(r.skipped[2], 1u);
    for (const auto& c : r.cells) {
        const auto g = static_cast<std::size_t>(c.group);
        EXPECT_EQ(c.test.n + c.excluded, r.detections[g]);
    }
    EXPECT_EQ(r.at(ImpactStat::volume, 0, SignGroup::all).test.n, 2u);
    EXPECT_EQ(r.at(ImpactStat::median_spread, 0, SignGroup::all).test.n, 1u);
}

TEST(Impact, BoundaryWindowsSkipped) {
    SimScenario sc;
    sc.n = 4000;
    const auto day = simulate_day(sc);
    const auto quotes = build_quotes(day.ticks);
    JumpDetection early;
    early.loc_start = day.ticks[10].exec_time;
    early.loc_end = day.ticks[12].exec_time;
    early.jump_size = 0.01;
    JumpDetection mid = early;
    mid.loc_start = day.ticks[2000].exec_time;
    mid.loc_end = day.ticks[2010].exec_time;
    std::vector<JumpDetection> d{early, mid};
    const auto w = collect_windows(day.ticks, quotes, d);
    EXPECT_TRUE(w[0].skipped);
    EXPECT_FALSE(w[1].skipped);
    EXPECT_EQ(w[1].spans.size(), 4u);
    EXPECT_TRUE(w[1].reference[static_cast<std::size_t>(ImpactStat::volume)].has_value());
}

TEST(Profiles, ConstantPrices) {
    const auto bars = bars_from(std::vector<double>(100, 250.0));
    std::vector<JumpDetection> d{at_bar(40, 0.02), at_bar(60, -0.02)};
    for (const auto& p : price_profiles(bars, d)) {
        for (double m : p.median) EXPECT_DOUBLE_EQ(m, 1.0);
    }
}

TEST(Profiles, FlatPathWithJump) {
    std::vector<JumpDetection> d;
    std::vector<double> prices;
    for (int j = 0; j < 5; ++j) {
        for (int i = 0; i < 40; ++i) prices.push_back(i < 20 ? 100.0 : 105.0);
        d.push_back(at_bar(static_cast<std::size_t>(j * 40 + 20), 0.05));
    }
    const auto bars = bars_from(prices);
    const auto p = price_profiles(bars, d);
    const auto& pos = p[static_cast<std::size_t>(SignGroup::positive)];
    EXPECT_EQ(pos.n, 5u);
    for (std::size_t i = 0; i < pos.offsets.size(); ++i) {
        EXPECT_NEAR(pos.median[i], pos.offsets[i] >= 0 ? 1.05 : 1.0, 1e-12);
    }
    EXPECT_EQ(p[static_cast<std::size_t>(SignGroup::negative)].n, 0u);
}

TEST(Profiles, BearishDriftBeforeJump) {
    std::vector<double> prices;
    double px = 100.0;
    for (int i = 0; i < 60; ++i) {
        if (i < 30) px *= 0.999;
        else if (i == 30) px *= 1.05;
        prices.push_back(px);
    }
    const auto bars = bars_from(prices);
    std::vector<JumpDetection> d{at_bar(30, 0.05)};
    const auto prof = price_profiles(bars, d)[0];
    for (std::size_t i = 1; i < prof.offsets.size(); ++i) {
        if (prof.offsets[i] < 0) EXPECT_LT(prof.median[i], prof.median[i - 1]);
    }
    const auto base = std::find(prof.offsets.begin(), prof.offsets.end(), -6) - prof.offsets.begin();
    EXPECT_DOUBLE_EQ(prof.median[static_cast<std::size_t>(base)], 1.0);
    EXPECT_GT(prof.median.back(), 1.04);
}

TEST(Profiles, RescalingInvariant) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0.0, 0.002);
    std::vector<double> prices{100.0};
    for (int i = 1; i < 200; ++i) prices.push_back(prices.back() * std::exp(g(rng)));
    auto scaled = prices;
    for (auto& p : scaled) p *= 37.0;
    std::vector<JumpDetection> d{at_bar(50, 0.01), at_bar(90, -0.01), at_bar(150, 0.02)};
    const auto a = price_profiles(bars_from(prices), d);
    const auto b = price_profiles(bars_from(scaled), d);
    for (std::size_t g2 = 0; g2 < 3; ++g2) {
        for (std::size_t i = 0; i < a[g2].median.size(); ++i) {
            if (std::isnan(a[g2].median[i])) continue;
            EXPECT_NEAR(a[g2].median[i], b[g2].median[i], 1e-12);
        }
    }
}

TEST(Profiles, FactorMeans) {
    std::vector<FeatureRow> rows(100);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].period_start = kT0 + minutes{5} * static_cast<int>(i);
        rows[i].wr = static_cast<double>(i);
    }
    std::vector<JumpDetection> d{at_bar(40, 0.01), at_bar(60, 0.01)};
    const auto f = factor_profiles(rows, d);
    EXPECT_EQ(f.n, 2u);
    const auto zero = std::find(f.offsets.begin(), f.offsets.end(), 0) - f.offsets.begin();
    EXPECT_DOUBLE_EQ(f.wr[static_cast<std::size_t>(zero)], 50.0);
}

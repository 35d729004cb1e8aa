#include "jumpkit/simkit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

namespace jumpkit {

namespace {

constexpr Micros kDay = std::chrono::hours{24};

std::string trader_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "sim%05zu", i);
    return buf;
}

}  // namespace

void SimScenario::validate() const {
    if (n < 100) throw ConfigError("scenario needs at least 100 ticks per day");
    if (static_cast<std::int64_t>(n) > kDay.count()) throw ConfigError("more ticks than microseconds in a day");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma must be finite and non-negative");
    if (!(noise_q2 >= 0.0) || !std::isfinite(noise_q2)) throw ConfigError("noise_q2 must be non-negative");
    if (noise_dependence < 0) throw ConfigError("noise_dependence must be non-negative");
    if (!ma_weights.empty() && ma_weights.size() != static_cast<std::size_t>(noise_dependence) + 1) {
        throw ConfigError("ma_weights needs noise_dependence + 1 entries");
    }
    if (jump_offsets.size() != jump_sizes.size()) throw ConfigError("jump_offsets and jump_sizes differ in length");
    for (auto t : jump_offsets) {
        if (t <= Micros::zero() || t >= kDay) throw ConfigError("jump offsets must lie inside the day");
    }
    if (trader_pool < 2) throw ConfigError("trader_pool must be at least 2");
    if (!(trade_size_log_sd >= 0.0)) throw ConfigError("trade_size_log_sd must be non-negative");
    for (const auto& s : shocks) {
        if (s.to < s.from || !(s.size_multiplier > 0.0)) throw ConfigError("bad activity shock");
    }
}

SimDay simulate_day(const SimScenario& sc) {
    sc.validate();
    std::mt19937_64 rng(sc.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, sc.trader_pool - 1);
    std::lognormal_distribution<double> size_dist(sc.trade_size_log_mean, sc.trade_size_log_sd);

    const std::size_t n = sc.n;
    const Instant t0 = day_start(sc.date);
    SimDay day;
    day.truth.sigma2T = sc.sigma * sc.sigma;
    day.truth.q2 = sc.noise_q2;

    std::vector<Instant> times(n);
    for (std::size_t i = 0; i < n; ++i) {
        times[i] = t0 + Micros{static_cast<std::int64_t>(i) * kDay.count() / static_cast<std::int64_t>(n)};
    }

    // Jump i lands on the first tick at or after its instant.
    std::vector<double> jump_at(n, 0.0);
    for (std::size_t j = 0; j < sc.jump_offsets.size(); ++j) {
        const Instant when = t0 + sc.jump_offsets[j];
        const auto it = std::lower_bound(times.begin(), times.end(), when);
        if (it == times.end()) continue;
        const auto idx = static_cast<std::size_t>(it - times.begin());
        if (idx == 0) continue;
        jump_at[idx] += sc.jump_sizes[j];
        day.truth.jump_times.push_back(when);
        day.truth.jump_sizes.push_back(sc.jump_sizes[j]);
        day.truth.jump_ticks.push_back(idx);
    }

    const double step_sd = sc.sigma / std::sqrt(static_cast<double>(n));
    auto& latent = day.truth.latent;
    latent.resize(n);
    latent[0] = sc.start_log_price;

    std::vector<double> w = sc.ma_weights;
    if (w.empty()) w.assign(static_cast<std::size_t>(sc.noise_dependence) + 1, 1.0);
    const double w2 = std::inner_product(w.begin(), w.end(), w.begin(), 0.0);
    const double eps_sd = w2 > 0.0 ? std::sqrt(sc.noise_q2 / w2) : 0.0;
    const std::size_t lags = w.size();
    std::vector<double> eps(n + lags - 1);
    for (auto& e : eps) e = eps_sd * gauss(rng);

    std::vector<double> brown(n);
    for (std::size_t i = 1; i < n; ++i) brown[i] = step_sd * gauss(rng);
    for (std::size_t i = 1; i < n; ++i) latent[i] = latent[i - 1] + brown[i] + jump_at[i];

    day.series.date = sc.date;
    day.series.times = times;
    day.series.log_prices.resize(n);
    day.series.aggressor.resize(n);
    day.series.buyer_ids.resize(n);
    day.series.seller_ids.resize(n);
    day.ticks.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        // eps[i + lags - 1] is the current innovation
        double u = 0.0;
        for (std::size_t l = 0; l < lags; ++l) u += w[l] * eps[i + lags - 1 - l];
        const double lp = latent[i] + u;
        const Aggressor side = eps[i + lags - 1] >= 0.0 ? Aggressor::bid : Aggressor::ask;
        const std::size_t buyer = pick(rng);
        std::size_t seller = pick(rng);
        while (seller == buyer) seller = pick(rng);
        double fiat = size_dist(rng);
        const Micros offset = times[i] - t0;
        for (const auto& s : sc.shocks) {
            if (offset >= s.from && offset < s.to) fiat *= s.size_multiplier;
        }

        day.series.log_prices[i] = lp;
        day.series.aggressor[i] = side;
        day.series.buyer_ids[i] = trader_name(buyer);
        day.series.seller_ids[i] = trader_name(seller);

        auto& t = day.ticks[i];
        t.exec_time = times[i];
        t.trade_id = static_cast<std::uint64_t>(to_micros(times[i]));
        t.buyer_id = day.series.buyer_ids[i];
        t.seller_id = day.series.seller_ids[i];
        t.aggressor = side;
        t.price = std::exp(lp);
        t.fiat_amount = fiat;
        t.btc_amount = fiat / t.price;
    }
    return day;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    // splitmix64 of the combined value
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::vector<SimDay> simulate_panel(const SimScenario& scenario, const PanelConfig& panel, unsigned threads) {
    scenario.validate();
    if (!(panel.p_positive >= 0.0 && panel.p_positive <= 1.0)) throw ConfigError("p_positive outside [0,1]");
    if (!(panel.jump_window_lo > 0.0 && panel.jump_window_lo < panel.jump_window_hi && panel.jump_window_hi < 1.0)) {
        throw ConfigError("jump window must satisfy 0 < lo < hi < 1");
    }
    const std::size_t total = panel.null_days + panel.jump_days;

    // Layout and jump parameters are drawn up front so the result does not
    // depend on thread count.
    std::mt19937_64 rng(derive_seed(scenario.seed, 0xFFFFFFFFULL));
    std::vector<bool> is_jump(total, false);
    std::fill(is_jump.begin(), is_jump.begin() + static_cast<std::ptrdiff_t>(panel.jump_days), true);
    std::shuffle(is_jump.begin(), is_jump.end(), rng);

    std::vector<SimScenario> days(total, scenario);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::lognormal_distribution<double> mag(std::log(panel.jump_log_median), panel.jump_log_sd);
    for (std::size_t d = 0; d < total; ++d) {
        auto& s = days[d];
        s.date = scenario.date + std::chrono::days{static_cast<int>(d)};
        s.seed = derive_seed(scenario.seed, d);
        s.shocks.clear();
        s.jump_offsets.clear();
        s.jump_sizes.clear();
        if (is_jump[d]) {
            const double frac = panel.jump_window_lo + (panel.jump_window_hi - panel.jump_window_lo) * unit(rng);
            const double size = mag(rng);
            const double sign = unit(rng) < panel.p_positive ? 1.0 : -1.0;
            s.jump_offsets.push_back(Micros{static_cast<std::int64_t>(frac * static_cast<double>(kDay.count()))});
            s.jump_sizes.push_back(sign * size);
        }
    }

    std::vector<SimDay> out(total);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t d; (d = next.fetch_add(1)) < total;) out[d] = simulate_day(days[d]);
    };
    {
        std::vector<std::jthread> pool;
        const unsigned nt = std::max(1u, threads);
        for (unsigned t = 1; t < nt; ++t) pool.emplace_back(worker);
        worker();
    }
    return out;
}

double oracle_runs_pvalue(const std::vector<bool>& flags) {
    const std::size_t n = flags.size();
    if (n > 20) throw std::invalid_argument("enumeration limited to 20 observations");
    std::size_t n1 = 0;
    for (bool f : flags) n1 += f ? 1 : 0;
    const std::size_t n2 = n - n1;
    if (n1 == 0 || n2 == 0) throw DegenerateSequence("runs test needs both categories");
    auto runs_of = [n](std::uint32_t mask) {
        std::size_t r = 1;
        for (std::size_t i = 1; i < n; ++i) r += ((mask >> i) & 1u) != ((mask >> (i - 1)) & 1u) ? 1 : 0;
        return r;
    };
    std::uint32_t observed = 0;
    for (std::size_t i = 0; i < n; ++i) observed |= flags[i] ? (1u << i) : 0u;
    const double mu = 1.0 + 2.0 * static_cast<double>(n1) * static_cast<double>(n2) / static_cast<double>(n);
    const double dev = std::abs(static_cast<double>(runs_of(observed)) - mu);
    std::uint64_t hits = 0;
    std::uint64_t total = 0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != n1) continue;
        ++total;
        if (std::abs(static_cast<double>(runs_of(mask)) - mu) >= dev - 1e-9) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(total);
}

void write_truth_csv(std::ostream& out, std::span<const SimDay> days) {
    out << "date,has_jump,jump_time_us,jump_time,jump_size,jump_tick,sigma2T,q2\n";
    char buf[256];
    for (const auto& d : days) {
        const std::string date = format_date(d.series.date);
        if (!d.has_jump()) {
            std::snprintf(buf, sizeof buf, "%s,0,,,,,%.17g,%.17g\n", date.c_str(), d.truth.sigma2T, d.truth.q2);
            out << buf;
            continue;
        }
        for (std::size_t j = 0; j < d.truth.jump_sizes.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%s,1,%lld,%s,%.17g,%zu,%.17g,%.17g\n", date.c_str(),
                          static_cast<long long>(to_micros(d.truth.jump_times[j])),
                          format_instant(d.truth.jump_times[j]).c_str(), d.truth.jump_sizes[j],
                          d.truth.jump_ticks[j], d.truth.sigma2T, d.truth.q2);
            out << buf;
        }
    }
}

namespace {

Micros seconds_to_micros(double s) { return Micros{static_cast<std::int64_t>(std::llround(s * 1e6))}; }

}  // namespace

void from_json(const nlohmann::json& j, SimScenario& s) {
    try {
        if (j.contains("date")) s.date = parse_date(j.at("date").get<std::string>());
        s.n = j.value("n", s.n);
        s.sigma = j.value("sigma", s.sigma);
        s.start_log_price = j.value("start_log_price", s.start_log_price);
        if (j.contains("jump_offsets_s")) {
            s.jump_offsets.clear();
            for (double v : j.at("jump_offsets_s")) s.jump_offsets.push_back(seconds_to_micros(v));
        }
        if (j.contains("jump_sizes")) s.jump_sizes = j.at("jump_sizes").get<std::vector<double>>();
        s.noise_q2 = j.value("noise_q2", s.noise_q2);
        s.noise_dependence = j.value("noise_dependence", s.noise_dependence);
        if (j.contains("ma_weights")) s.ma_weights = j.at("ma_weights").get<std::vector<double>>();
        s.seed = j.value("seed", s.seed);
        s.trader_pool = j.value("trader_pool", s.trader_pool);
        s.trade_size_log_mean = j.value("trade_size_log_mean", s.trade_size_log_mean);
        s.trade_size_log_sd = j.value("trade_size_log_sd", s.trade_size_log_sd);
        if (j.contains("shocks")) {
            s.shocks.clear();
            for (const auto& e : j.at("shocks")) {
                s.shocks.push_back(ActivityShock{seconds_to_micros(e.at("from_s").get<double>()),
                                                 seconds_to_micros(e.at("to_s").get<double>()),
                                                 e.value("size_multiplier", 1.0)});
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
}

void from_json(const nlohmann::json& j, PanelConfig& p) {
    try {
        p.null_days = j.value("null_days", p.null_days);
        p.jump_days = j.value("jump_days", p.jump_days);
        p.jump_log_median = j.value("jump_log_median", p.jump_log_median);
        p.jump_log_sd = j.value("jump_log_sd", p.jump_log_sd);
        p.p_positive = j.value("p_positive", p.p_positive);
        p.jump_window_lo = j.value("jump_window_lo", p.jump_window_lo);
        p.jump_window_hi = j.value("jump_window_hi", p.jump_window_hi);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("panel: ") + e.what());
    }
}

}  // namespace jumpkit

#include "jumpkit/eventstudy.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "jumpkit/stats.hpp"

namespace jumpkit {

std::string_view stat_name(ImpactStat s) {
    switch (s) {
        case ImpactStat::realized_variance: return "realized_variance";
        case ImpactStat::noise_variance: return "noise_variance";
        case ImpactStat::abs_order_flow: return "abs_order_flow";
        case ImpactStat::volume: return "volume";
        case ImpactStat::n_traders: return "n_traders";
        case ImpactStat::median_spread: return "median_spread";
        case ImpactStat::median_price: return "median_price";
        case ImpactStat::whale_index: return "whale_index";
    }
    return "?";
}

std::string_view stat_label(ImpactStat s) {
    switch (s) {
        case ImpactStat::realized_variance: return "Realized variance";
        case ImpactStat::noise_variance: return "Noise variance";
        case ImpactStat::abs_order_flow: return "Abs. order flow";
        case ImpactStat::volume: return "Volume";
        case ImpactStat::n_traders: return "Nb. traders";
        case ImpactStat::median_spread: return "Med. spread";
        case ImpactStat::median_price: return "Med. price";
        case ImpactStat::whale_index: return "Whales";
    }
    return "?";
}

std::string_view group_name(SignGroup g) {
    switch (g) {
        case SignGroup::all: return "all";
        case SignGroup::positive: return "positive";
        case SignGroup::negative: return "negative";
    }
    return "?";
}

bool in_group(SignGroup g, double jump_size) {
    switch (g) {
        case SignGroup::all: return true;
        case SignGroup::positive: return jump_size > 0.0;
        case SignGroup::negative: return jump_size < 0.0;
    }
    return false;
}

TTest one_sample_ttest(std::span<const double> x) {
    TTest r;
    r.n = x.size();
    if (x.empty()) return r;
    r.mean = stats::mean(x);
    if (x.size() < 2) return r;
    const double sd = stats::sample_sd(x);
    if (sd == 0.0) {
        if (r.mean != 0.0) {
            r.t = std::copysign(INFINITY, r.mean);
            r.p = 0.0;
        }
        return r;
    }
    r.t = r.mean / (sd / std::sqrt(static_cast<double>(x.size())));
    r.p = stats::student_t_two_sided_p(r.t, static_cast<double>(x.size() - 1));
    return r;
}

StatValues stat_values(const WindowStats& w) {
    StatValues v{};
    v[static_cast<std::size_t>(ImpactStat::realized_variance)] = w.rv;
    v[static_cast<std::size_t>(ImpactStat::noise_variance)] = w.nv;
    v[static_cast<std::size_t>(ImpactStat::abs_order_flow)] = w.abs_order_flow;
    v[static_cast<std::size_t>(ImpactStat::volume)] = w.volume;
    v[static_cast<std::size_t>(ImpactStat::n_traders)] = static_cast<double>(w.n_traders);
    v[static_cast<std::size_t>(ImpactStat::median_spread)] = w.median_spread;
    v[static_cast<std::size_t>(ImpactStat::median_price)] = w.median_price;
    v[static_cast<std::size_t>(ImpactStat::whale_index)] = w.whale;
    return v;
}

std::vector<JumpWindows> collect_windows(std::span<const TickTrade> ticks, const QuoteSeries& quotes,
                                         std::span<const JumpDetection> detections,
                                         const ImpactConfig& cfg) {
    if (cfg.n_spans < 1 || cfg.span <= Micros::zero()) throw ConfigError("impact spans must be positive");
    std::vector<JumpWindows> out;
    out.reserve(detections.size());
    const auto stats_for = [&](Instant from, Instant to) {
        const auto [a, b] = tick_range(ticks, from, to);
        return stat_values(window_stats(ticks, quotes, a, b, cfg.k, cfg.preavg_const));
    };
    for (const auto& d : detections) {
        JumpWindows w;
        w.jump_size = d.jump_size;
        const Instant ref_from = d.loc_start - cfg.reference_offset;
        const Instant post_to = d.loc_end + cfg.n_spans * cfg.span;
        if (ticks.empty() || ref_from < ticks.front().exec_time || post_to > ticks.back().exec_time) {
            w.skipped = true;
            out.push_back(std::move(w));
            continue;
        }
        w.reference = stats_for(ref_from, ref_from + cfg.span);
        for (int s = 0; s < cfg.n_spans; ++s) {
            const Instant from = d.loc_end + s * cfg.span;
            w.spans.push_back(stats_for(from, from + cfg.span));
        }
        out.push_back(std::move(w));
    }
    return out;
}

const ImpactCell& ImpactReport::at(ImpactStat s, int span, SignGroup g) const {
    for (const auto& c : cells) {
        if (c.stat == s && c.span == span && c.group == g) return c;
    }
    throw std::out_of_range("no such impact cell");
}

ImpactReport impact_from_windows(std::span<const JumpWindows> windows, int n_spans, Micros span_width) {
    ImpactReport r;
    r.n_spans = n_spans;
    r.span_width = span_width;
    for (std::size_t g = 0; g < 3; ++g) {
        for (const auto& w : windows) {
            if (!in_group(all_sign_groups[g], w.jump_size)) continue;
            ++r.detections[g];
            if (w.skipped) ++r.skipped[g];
        }
    }
    for (ImpactStat stat : all_impact_stats) {
        const auto si = static_cast<std::size_t>(stat);
        for (int s = 0; s < n_spans; ++s) {
            for (std::size_t g = 0; g < 3; ++g) {
                std::vector<double> ratios;
                for (const auto& w : windows) {
                    if (!in_group(all_sign_groups[g], w.jump_size) || w.skipped) continue;
                    const auto& ref = w.reference[si];
                    const auto& post = w.spans.at(static_cast<std::size_t>(s))[si];
                    if (!ref || !post || !(*ref > 0.0) || !(*post > 0.0)) continue;
                    ratios.push_back(std::log(*post / *ref));
                }
                ImpactCell c;
                c.stat = stat;
                c.span = s;
                c.group = all_sign_groups[g];
                c.test = one_sample_ttest(ratios);
                c.excluded = r.detections[g] - ratios.size();
                r.cells.push_back(c);
            }
        }
    }
    return r;
}

ImpactReport impact_ttests(std::span<const TickTrade> ticks, const QuoteSeries& quotes,
                           std::span<const JumpDetection> detections, const ImpactConfig& cfg) {
    const auto windows = collect_windows(ticks, quotes, detections, cfg);
    return impact_from_windows(windows, cfg.n_spans, cfg.span);
}

void to_json(nlohmann::json& j, const ImpactReport& r) {
    const auto minutes = std::chrono::duration_cast<std::chrono::minutes>(r.span_width).count();
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : r.cells) {
        const auto t = std::isfinite(c.test.t) ? nlohmann::json(c.test.t) : nlohmann::json(nullptr);
        cells.push_back({{"statistic", stat_name(c.stat)},
                         {"span", std::to_string(c.span * minutes) + "-" + std::to_string((c.span + 1) * minutes)},
                         {"group", group_name(c.group)},
                         {"n", c.test.n},
                         {"excluded", c.excluded},
                         {"mean_log_ratio", c.test.mean},
                         {"t", t},
                         {"p_value", c.test.p}});
    }
    nlohmann::json groups = nlohmann::json::object();
    for (std::size_t g = 0; g < 3; ++g) {
        groups[std::string(group_name(all_sign_groups[g]))] = {{"detections", r.detections[g]},
                                                                {"skipped", r.skipped[g]}};
    }
    j = nlohmann::json{{"span_minutes", minutes}, {"n_spans", r.n_spans}, {"groups", groups}, {"cells", cells}};
}

namespace {

// Bar index holding the localization midpoint, assuming a contiguous grid.
std::optional<std::ptrdiff_t> anchor_bar(Instant first_bar, std::size_t n_bars, const JumpDetection& d,
                                         Micros width) {
    const Instant mid = d.loc_start + (d.loc_end - d.loc_start) / 2;
    if (mid < first_bar) return std::nullopt;
    const auto idx = static_cast<std::ptrdiff_t>((mid - first_bar) / width);
    if (idx >= static_cast<std::ptrdiff_t>(n_bars)) return std::nullopt;
    return idx;
}

}  // namespace

std::vector<PriceProfile> price_profiles(std::span<const BarRow> bars,
                                         std::span<const JumpDetection> detections,
                                         const ProfileConfig& cfg) {
    if (cfg.base_offset < -cfg.bars_before || cfg.base_offset > cfg.bars_after) {
        throw ConfigError("profile base offset outside the profile range");
    }
    const std::size_t width = static_cast<std::size_t>(cfg.bars_before + cfg.bars_after + 1);
    std::vector<PriceProfile> out;
    for (SignGroup g : all_sign_groups) {
        PriceProfile p;
        p.group = g;
        for (int o = -cfg.bars_before; o <= cfg.bars_after; ++o) p.offsets.push_back(o);
        std::vector<std::vector<double>> columns(width);
        if (!bars.empty()) {
            for (const auto& d : detections) {
                if (!in_group(g, d.jump_size)) continue;
                const auto idx = anchor_bar(bars.front().period_start, bars.size(), d, cfg.bar_width);
                if (!idx) continue;
                const auto lo = *idx - cfg.bars_before;
                const auto hi = *idx + cfg.bars_after;
                if (lo < 0 || hi >= static_cast<std::ptrdiff_t>(bars.size())) continue;
                const double base = bars[static_cast<std::size_t>(*idx + cfg.base_offset)].median_price;
                if (!(base > 0.0)) continue;
                for (std::size_t c = 0; c < width; ++c) {
                    columns[c].push_back(bars[static_cast<std::size_t>(lo) + c].median_price / base);
                }
                ++p.n;
            }
        }
        for (auto& col : columns) p.median.push_back(col.empty() ? NAN : stats::median(std::move(col)));
        out.push_back(std::move(p));
    }
    return out;
}

FactorProfile factor_profiles(std::span<const FeatureRow> features,
                              std::span<const JumpDetection> detections, const ProfileConfig& cfg) {
    FactorProfile p;
    const std::size_t width = static_cast<std::size_t>(cfg.bars_before + cfg.bars_after + 1);
    for (int o = -cfg.bars_before; o <= cfg.bars_after; ++o) p.offsets.push_back(o);
    p.wr.assign(width, 0.0);
    p.ms.assign(width, 0.0);
    p.nv.assign(width, 0.0);
    p.of.assign(width, 0.0);
    if (!features.empty()) {
        for (const auto& d : detections) {
            const auto idx = anchor_bar(features.front().period_start, features.size(), d, cfg.bar_width);
            if (!idx) continue;
            const auto lo = *idx - cfg.bars_before;
            const auto hi = *idx + cfg.bars_after;
            if (lo < 0 || hi >= static_cast<std::ptrdiff_t>(features.size())) continue;
            for (std::size_t c = 0; c < width; ++c) {
                const auto& r = features[static_cast<std::size_t>(lo) + c];
                p.wr[c] += r.wr;
                p.ms[c] += r.ms;
                p.nv[c] += r.nv;
                p.of[c] += r.of;
            }
            ++p.n;
        }
    }
    const double n = p.n > 0 ? static_cast<double>(p.n) : NAN;
    for (std::size_t c = 0; c < width; ++c) {
        p.wr[c] /= n;
        p.ms[c] /= n;
        p.nv[c] /= n;
        p.of[c] /= n;
    }
    return p;
}

void write_profile_csv(std::ostream& out, const PriceProfile& p, Micros bar_width) {
    const auto minutes = std::chrono::duration_cast<std::chrono::minutes>(bar_width).count();
    out << "offset_bars,offset_minutes,median_normalized_price,n\n";
    char buf[128];
    for (std::size_t i = 0; i < p.offsets.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%d,%lld,%.17g,%zu\n", p.offsets[i],
                      static_cast<long long>(p.offsets[i] * minutes), p.median[i], p.n);
        out << buf;
    }
}

void write_factor_csv(std::ostream& out, const FactorProfile& p, Micros bar_width) {
    const auto minutes = std::chrono::duration_cast<std::chrono::minutes>(bar_width).count();
    out << "offset_bars,offset_minutes,wr,ms,nv,of,n\n";
    char buf[256];
    for (std::size_t i = 0; i < p.offsets.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%d,%lld,%.17g,%.17g,%.17g,%.17g,%zu\n", p.offsets[i],
                      static_cast<long long>(p.offsets[i] * minutes), p.wr[i], p.ms[i], p.nv[i],
                      p.of[i], p.n);
        out << buf;
    }
}

}  // namespace jumpkit

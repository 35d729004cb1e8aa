#pragma once

// Post-jump impact tests and normalized price profiles.

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "jumpkit/features.hpp"
#include "jumpkit/jumptest.hpp"
#include "jumpkit/series.hpp"

namespace jumpkit {

enum class ImpactStat {
    realized_variance,
    noise_variance,
    abs_order_flow,
    volume,
    n_traders,
    median_spread,
    median_price,
    whale_index,
};
inline constexpr std::size_t kImpactStats = 8;
inline constexpr std::array<ImpactStat, kImpactStats> all_impact_stats{
    ImpactStat::realized_variance, ImpactStat::noise_variance, ImpactStat::abs_order_flow,
    ImpactStat::volume,            ImpactStat::n_traders,      ImpactStat::median_spread,
    ImpactStat::median_price,      ImpactStat::whale_index};
std::string_view stat_name(ImpactStat s);
std::string_view stat_label(ImpactStat s);  // human-readable row label

enum class SignGroup { all, positive, negative };
inline constexpr std::array<SignGroup, 3> all_sign_groups{SignGroup::all, SignGroup::positive,
                                                          SignGroup::negative};
std::string_view group_name(SignGroup g);
bool in_group(SignGroup g, double jump_size);

struct TTest {
    std::size_t n = 0;
    double mean = 0.0;
    double t = 0.0;
    double p = 1.0;
};
// Two-sided one-sample Student t-test of zero mean. Fewer than two
// observations or all-zero input give t = 0, p = 1.
TTest one_sample_ttest(std::span<const double> x);

struct ImpactConfig {
    Micros span = std::chrono::minutes{15};
    int n_spans = 4;
    Micros reference_offset = std::chrono::minutes{60};  // reference starts this long before loc_start
    int k = 4;
    double preavg_const = 0.2;
};

using StatValues = std::array<std::optional<double>, kImpactStats>;
StatValues stat_values(const WindowStats& w);

// Reference and post-jump window statistics for one detection. Post spans
// start at the end of the localization window.
struct JumpWindows {
    double jump_size = 0.0;
    bool skipped = false;  // some window crosses the sample boundary
    StatValues reference{};
    std::vector<StatValues> spans;
};

std::vector<JumpWindows> collect_windows(std::span<const TickTrade> ticks, const QuoteSeries& quotes,
                                         std::span<const JumpDetection> detections,
                                         const ImpactConfig& cfg = {});

struct ImpactCell {
    ImpactStat stat{};
    int span = 0;  // 0-based
    SignGroup group{};
    TTest test;
    std::size_t excluded = 0;  // boundary skips plus undefined log-ratios
};

struct ImpactReport {
    int n_spans = 4;
    Micros span_width = std::chrono::minutes{15};
    std::array<std::size_t, 3> detections{};  // per sign group
    std::array<std::size_t, 3> skipped{};     // boundary crossings per sign group
    std::vector<ImpactCell> cells;
    const ImpactCell& at(ImpactStat s, int span, SignGroup g) const;
};

ImpactReport impact_from_windows(std::span<const JumpWindows> windows, int n_spans,
                                 Micros span_width = std::chrono::minutes{15});

ImpactReport impact_ttests(std::span<const TickTrade> ticks, const QuoteSeries& quotes,
                           std::span<const JumpDetection> detections, const ImpactConfig& cfg = {});

void to_json(nlohmann::json& j, const ImpactReport& r);

struct ProfileConfig {
    Micros bar_width = std::chrono::minutes{5};
    int bars_before = 12;
    int bars_after = 12;
    int base_offset = -6;  // bar 30 minutes before the jump at 5-minute bars
};

// Median normalized price per bar offset. Offset 0 is the bar holding the
// midpoint of the localization window.
struct PriceProfile {
    SignGroup group{};
    std::vector<int> offsets;
    std::vector<double> median;
    std::size_t n = 0;  // detections contributing
};

std::vector<PriceProfile> price_profiles(std::span<const BarRow> bars,
                                         std::span<const JumpDetection> detections,
                                         const ProfileConfig& cfg = {});

// Mean covariates per bar offset around jumps.
struct FactorProfile {
    std::vector<int> offsets;
    std::vector<double> wr;
    std::vector<double> ms;
    std::vector<double> nv;
    std::vector<double> of;
    std::size_t n = 0;
};

FactorProfile factor_profiles(std::span<const FeatureRow> features,
                              std::span<const JumpDetection> detections, const ProfileConfig& cfg = {});

// Columns: offset_bars, offset_minutes, median_normalized_price, n
void write_profile_csv(std::ostream& out, const PriceProfile& p, Micros bar_width);
// Columns: offset_bars, offset_minutes, wr, ms, nv, of, n
void write_factor_csv(std::ostream& out, const FactorProfile& p, Micros bar_width);

}  // namespace jumpkit

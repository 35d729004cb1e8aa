#include "jumpkit/multiplicity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "jumpkit/stats.hpp"

namespace jumpkit {

FdrResult fdr_select(std::span<const double> p_values, double q) {
    FdrResult out;
    out.q_target = q;
    const std::size_t m = p_values.size();
    if (m == 0) return out;
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });

    std::size_t cutoff = 0;  // number rejected
    for (std::size_t i = m; i >= 1; --i) {
        const double p = p_values[order[i - 1]];
        if (p <= static_cast<double>(i) * q / static_cast<double>(m)) {
            cutoff = i;
            break;
        }
    }
    if (cutoff == 0) return out;
    out.threshold_p = p_values[order[cutoff - 1]];
    out.rejected.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cutoff));
    std::sort(out.rejected.begin(), out.rejected.end());
    return out;
}

GroupSummary summarize(std::span<const double> sizes) {
    GroupSummary g;
    g.n = sizes.size();
    if (sizes.empty()) return g;
    std::vector<double> abs_sizes(sizes.size());
    std::transform(sizes.begin(), sizes.end(), abs_sizes.begin(), [](double v) { return std::abs(v); });
    const double m = stats::mean(sizes);
    g.mean = m;
    g.mean_abs = stats::mean(abs_sizes);
    g.median_abs = stats::median(abs_sizes);
    g.max = *std::max_element(sizes.begin(), sizes.end());
    g.min = *std::min_element(sizes.begin(), sizes.end());
    if (sizes.size() >= 2) {
        g.std_dev = stats::sample_sd(sizes);
        double m2 = 0.0, m3 = 0.0, m4 = 0.0;
        for (double v : sizes) {
            const double d = v - m;
            m2 += d * d;
            m3 += d * d * d;
            m4 += d * d * d * d;
        }
        const double nd = static_cast<double>(sizes.size());
        m2 /= nd;
        m3 /= nd;
        m4 /= nd;
        if (m2 > 0.0) {
            g.skewness = m3 / std::pow(m2, 1.5);
            g.kurtosis = m4 / (m2 * m2);
        }
    }
    return g;
}

JumpSummary jump_summary(std::span<const double> sizes) {
    std::vector<double> pos;
    std::vector<double> neg;
    for (double v : sizes) {
        if (v > 0.0) pos.push_back(v);
        else if (v < 0.0) neg.push_back(v);
    }
    return JumpSummary{summarize(sizes), summarize(pos), summarize(neg)};
}

namespace {

double log_choose(double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// log of the number of arrangements of n1 ones and n2 zeros with exactly r runs.
double log_run_count(std::size_t n1, std::size_t n2, std::size_t r) {
    const double a = static_cast<double>(n1) - 1.0;
    const double b = static_cast<double>(n2) - 1.0;
    auto term = [&](double s1, double s2) -> double {
        if (s1 < 0 || s2 < 0 || s1 > a || s2 > b) return -INFINITY;
        return log_choose(a, s1) + log_choose(b, s2);
    };
    if (r % 2 == 0) {
        const double s = static_cast<double>(r / 2) - 1.0;
        return std::log(2.0) + term(s, s);
    }
    const double s = static_cast<double>((r - 1) / 2);
    const double t1 = term(s, s - 1.0);
    const double t2 = term(s - 1.0, s);
    const double hi = std::max(t1, t2);
    if (hi == -INFINITY) return -INFINITY;
    return hi + std::log(std::exp(t1 - hi) + std::exp(t2 - hi));
}

}  // namespace

double runs_exact_p_value(std::size_t n1, std::size_t n2, std::size_t runs) {
    if (n1 == 0 || n2 == 0) throw DegenerateSequence("runs test needs both categories");
    const double nd = static_cast<double>(n1 + n2);
    const double mu = 1.0 + 2.0 * static_cast<double>(n1) * static_cast<double>(n2) / nd;
    const double dev = std::abs(static_cast<double>(runs) - mu) - 1e-9;
    const double log_total = log_choose(nd, static_cast<double>(n1));
    double p = 0.0;
    for (std::size_t r = 2; r <= n1 + n2; ++r) {
        if (std::abs(static_cast<double>(r) - mu) >= dev) {
            const double lc = log_run_count(n1, n2, r);
            if (lc != -INFINITY) p += std::exp(lc - log_total);
        }
    }
    return std::min(1.0, p);
}

RunsTestResult runs_test(const std::vector<bool>& flags, std::size_t exact_below) {
    RunsTestResult out;
    for (bool f : flags) (f ? out.n_jump_days : out.n_quiet_days) += 1;
    if (out.n_jump_days == 0 || out.n_quiet_days == 0) {
        throw DegenerateSequence("runs test needs both jump and quiet days");
    }
    out.runs_observed = 1;
    for (std::size_t i = 1; i < flags.size(); ++i) {
        if (flags[i] != flags[i - 1]) ++out.runs_observed;
    }
    const double n1 = static_cast<double>(out.n_jump_days);
    const double n2 = static_cast<double>(out.n_quiet_days);
    const double n = n1 + n2;
    out.expected_runs = 1.0 + 2.0 * n1 * n2 / n;
    out.variance = 2.0 * n1 * n2 * (2.0 * n1 * n2 - n1 - n2) / (n * n * (n - 1.0));
    out.z = out.variance > 0.0
                ? (static_cast<double>(out.runs_observed) - out.expected_runs) / std::sqrt(out.variance)
                : 0.0;
    out.p_normal = out.variance > 0.0 ? stats::two_sided_normal_p(out.z) : 1.0;
    out.exact = std::min(out.n_jump_days, out.n_quiet_days) < exact_below;
    out.p_value = out.exact
                      ? runs_exact_p_value(out.n_jump_days, out.n_quiet_days, out.runs_observed)
                      : out.p_normal;
    return out;
}

std::vector<SubPeriod> default_subperiods() {
    using namespace std::chrono;
    return {SubPeriod{Date{2011y / June / 26}, Date{2012y / April / 16}},
            SubPeriod{Date{2012y / April / 17}, Date{2013y / February / 6}},
            SubPeriod{Date{2013y / February / 7}, Date{2013y / November / 29}}};
}

int subperiod_of(Date d, std::span<const SubPeriod> periods) {
    for (std::size_t i = 0; i < periods.size(); ++i) {
        if (d >= periods[i].first && d <= periods[i].last) return static_cast<int>(i) + 1;
    }
    return 0;
}

}  // namespace jumpkit

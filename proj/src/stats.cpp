#include "jumpkit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace jumpkit::stats {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Large-|z| asymptotic series for Φ(z)·(-z)/φ(z) = 1 - 1/z² + 3/z⁴ - 15/z⁶ + ...
double tail_series(double z) {
    const double w = 1.0 / (z * z);
    return 1.0 - w * (1.0 - 3.0 * w * (1.0 - 5.0 * w * (1.0 - 7.0 * w)));
}
}  // namespace

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

double log_normal_cdf(double z) {
    if (z > -30.0) return std::log(normal_cdf(z));
    return -0.5 * z * z - std::log(-z) - 0.5 * std::log(2.0 * std::numbers::pi) +
           std::log(tail_series(z));
}

double mills_ratio(double z) {
    if (z > -30.0) {
        const double cdf = normal_cdf(z);
        return normal_pdf(z) / cdf;
    }
    return -z / tail_series(z);
}

double two_sided_normal_p(double z) { return std::erfc(std::abs(z) * kInvSqrt2); }

double student_t_two_sided_p(double t, double df) {
    if (!std::isfinite(t)) return 0.0;
    const boost::math::students_t dist(df);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

double chi_squared_sf(double x, double df) {
    if (x <= 0.0) return 1.0;
    const boost::math::chi_squared dist(df);
    return boost::math::cdf(boost::math::complement(dist, x));
}

double mean(std::span<const double> x) {
    if (x.empty()) return 0.0;
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_sd(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double median(std::vector<double> x) {
    if (x.empty()) throw std::invalid_argument("median of empty sample");
    const std::size_t mid = x.size() / 2;
    std::nth_element(x.begin(), x.begin() + mid, x.end());
    const double upper = x[mid];
    if (x.size() % 2 == 1) return upper;
    const double lower = *std::max_element(x.begin(), x.begin() + mid);
    return 0.5 * (lower + upper);
}

}  // namespace jumpkit::stats

#pragma once

#include <span>
#include <vector>

namespace jumpkit::stats {

double normal_pdf(double z);
double normal_cdf(double z);
// log Φ(z), accurate deep into the lower tail.
double log_normal_cdf(double z);
// φ(z)/Φ(z) (inverse Mills ratio), stable for very negative z.
double mills_ratio(double z);
double two_sided_normal_p(double z);

double student_t_two_sided_p(double t, double df);
double chi_squared_sf(double x, double df);

double mean(std::span<const double> x);
// Sample standard deviation with n-1 denominator; 0 when n < 2.
double sample_sd(std::span<const double> x);
// Median; even counts average the two central values. Requires non-empty input.
double median(std::vector<double> x);

}  // namespace jumpkit::stats

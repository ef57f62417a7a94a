// ============================================================================
// support.hpp -- shared fixtures for the test programs.
// ============================================================================
#pragma once

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "erspad/er_model.hpp"
#include "erspad/histogram.hpp"

namespace erspad::testing {

/// Detector fitted to the reference SPAD.
inline constexpr ErParams reference_detector{0.19117, 80.09205e-6, 112.5e-9};

/// Mean on-time from the lower incomplete gamma function. Substituting
/// u = R* tau_r e^{-t/tau_r} in the survival integral gives
///   <t> = tau_r e^a a^{-a} gamma(a, a),  a = R* tau_r.
/// The product is evaluated in logs, gamma(a, a) = P(a, a) Gamma(a).
inline double gamma_mean_on_time(double r_star, double tau_r) {
  const double a = r_star * tau_r;
  const double log_lower = std::log(boost::math::gamma_p(a, a)) + boost::math::lgamma(a);
  return tau_r * std::exp(a - a * std::log(a) + log_lower);
}

/// Relative deviation |x/ref - 1|.
inline double rel_err(double x, double ref) { return std::abs(x / ref - 1.0); }

/// Multinomial draw of n intervals over 1 ns style bins from the exact ER
/// bin probabilities. Bins start at `origin` and extend until the remaining
/// survival is below 1e-12.
inline IntervalHistogram multinomial_histogram(double r_star, const ErParams& p, std::uint64_t n,
                                               double bin_width, std::uint64_t seed,
                                               double origin = 0.0) {
  IntervalHistogram h;
  h.bin_width = bin_width;
  h.origin = origin;
  std::mt19937_64 rng(seed);
  double remaining_p = 1.0;
  std::uint64_t remaining_n = n;
  for (std::size_t k = 0;; ++k) {
    const double lo = std::max(h.left(k) - p.tau_d, 0.0);
    const double hi = h.left(k) + bin_width - p.tau_d;
    double prob = 0.0;
    if (hi > 0.0) prob = er_ccdf(lo, r_star, p.tau_r) - er_ccdf(hi, r_star, p.tau_r);
    std::uint64_t c = 0;
    if (prob > 0.0 && remaining_n > 0) {
      const double q = std::min(1.0, prob / remaining_p);
      c = std::binomial_distribution<std::uint64_t>(remaining_n, q)(rng);
    }
    h.counts.push_back(c);
    remaining_n -= c;
    remaining_p -= prob;
    h.total += c;
    if (hi > 0.0 && (er_ccdf(hi, r_star, p.tau_r) < 1e-12 || remaining_n == 0)) break;
  }
  return h;
}

}  // namespace erspad::testing

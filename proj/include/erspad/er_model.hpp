// ============================================================================
// er_model.hpp -- exponential-recovery (ER) detector model.
//
// After each dead-time window the excess bias recharges through the quench
// resistor, so the efficiency recovers as eta(t) = eta0 (1 - exp(-t/tau_r)).
// With the a priori rate R* = eta0 r_i (+ a priori dark rate) the on-time
// density is
//
//   p(t) = R* (1 - e^{-t/tau_r}) exp(-Lambda(t)),
//   Lambda(t) = R* [t - tau_r (1 - e^{-t/tau_r})].
//
// The mean on-time has no closed form and is integrated numerically. The
// approx_low_* / approx_high_* families are the asymptotic expansions for
// R* tau_r << 1 and R* tau_r >> 1; they are never substituted silently.
// ============================================================================
#pragma once

#include <cmath>
#include <numbers>
#include <sstream>

#include "erspad/errors.hpp"
#include "erspad/nhpp.hpp"
#include "erspad/numeric.hpp"

namespace erspad {

/// Detector triple of the ER model.
struct ErParams {
  double eta0 = 1.0;   // asymptotic quantum efficiency, (0, 1]
  double tau_d = 0.0;  // dead-time [s]
  double tau_r = 0.0;  // recovery time constant [s]

  void validate() const {
    if (!(eta0 > 0.0 && eta0 <= 1.0)) throw DomainError("eta0 must lie in (0, 1]");
    if (!(tau_d > 0.0)) throw DomainError("tau_d must be positive");
    if (!(tau_r > 0.0)) throw DomainError("tau_r must be positive");
  }
};

/// Light source seen by the detector.
struct SourceParams {
  double r_i = 0.0;           // impinging photon rate [1/s]
  double dark_apriori = 0.0;  // a priori dark-count rate [1/s]

  void validate() const {
    if (!(r_i >= 0.0) || !(dark_apriori >= 0.0))
      throw DomainError("photon and dark rates must be non-negative");
  }

  /// R* = eta0 r_i + dark, the rate seen by a fully recovered detector.
  double apriori_rate(const ErParams& p) const { return p.eta0 * r_i + dark_apriori; }
};

/// eta(t) = eta0 (1 - exp(-t/tau_r)) with the closed-form integral.
struct ExponentialRecovery {
  double eta0 = 1.0;
  double tau_r = 0.0;

  double eval(double t) const { return eta0 * numeric::one_minus_exp_neg(t / tau_r); }
  double cumulative(double t) const { return eta0 * tau_r * numeric::recovery_ramp(t / tau_r); }
};

namespace detail {

inline void require_er_args(double t, double r_star, double tau_r) {
  if (!(t >= 0.0)) throw DomainError("time must be non-negative");
  if (!(r_star >= 0.0)) throw DomainError("a priori rate must be non-negative");
  if (!(tau_r > 0.0)) throw DomainError("tau_r must be positive");
}

}  // namespace detail

inline double er_efficiency(double t, const ErParams& p) {
  if (!(t >= 0.0)) throw DomainError("time must be non-negative");
  return ExponentialRecovery{p.eta0, p.tau_r}.eval(t);
}

/// Lambda(t) = R* [t - tau_r (1 - e^{-t/tau_r})].
inline double er_cumulative_hazard(double t, double r_star, double tau_r) {
  detail::require_er_args(t, r_star, tau_r);
  return r_star * tau_r * numeric::recovery_ramp(t / tau_r);
}

inline double er_ccdf(double t, double r_star, double tau_r) {
  return std::exp(-er_cumulative_hazard(t, r_star, tau_r));
}

inline double er_cdf(double t, double r_star, double tau_r) {
  return -std::expm1(-er_cumulative_hazard(t, r_star, tau_r));
}

/// log p(t); evaluated additively so that R* tau_r beyond ~700 cannot
/// overflow the exp(R* tau_r (1 - e^{-t/tau_r})) factor.
inline double er_log_pdf(double t, double r_star, double tau_r) {
  const double hazard = er_cumulative_hazard(t, r_star, tau_r);
  if (t == 0.0 || r_star == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(r_star) + std::log(numeric::one_minus_exp_neg(t / tau_r)) - hazard;
}

inline double er_pdf(double t, double r_star, double tau_r) {
  return std::exp(er_log_pdf(t, r_star, tau_r));
}

/// Density on the measured inter-detection axis: zero inside the dead-time,
/// the on-time density shifted by tau_d afterwards.
inline double er_interval_pdf(double delta, const ErParams& p, const SourceParams& src) {
  if (!(delta > p.tau_d)) return 0.0;
  return er_pdf(delta - p.tau_d, src.apriori_rate(p), p.tau_r);
}

inline double er_interval_cdf(double delta, const ErParams& p, const SourceParams& src) {
  if (!(delta > p.tau_d)) return 0.0;
  return er_cdf(delta - p.tau_d, src.apriori_rate(p), p.tau_r);
}

/// Mean detector-on time, relative accuracy ~1e-12.
inline double er_mean_on_time(double r_star, double tau_r) {
  if (!(r_star > 0.0)) throw DomainError("a priori rate must be positive");
  if (!(tau_r > 0.0)) throw DomainError("tau_r must be positive");
  return mean_on_time(ExponentialRecovery{1.0, tau_r}, r_star);
}

/// Measured rate for a given a priori rate R*.
inline double er_rate_forward_apriori(double r_star, const ErParams& p) {
  return rate_forward(er_mean_on_time(r_star, p.tau_r), p.tau_d);
}

inline double er_rate_forward(const SourceParams& src, const ErParams& p) {
  src.validate();
  return er_rate_forward_apriori(src.apriori_rate(p), p);
}

/// A priori rate R* (dark counts included) reproducing the measured rate r.
inline double er_rate_inverse(double r, const ErParams& p) {
  if (!(p.tau_d > 0.0) || !(p.tau_r > 0.0)) throw DomainError("tau_d and tau_r must be positive");
  const double supremum = 1.0 / p.tau_d;
  if (r >= supremum) {
    std::ostringstream os;
    os << "measured rate " << r << " /s is at or above the saturation rate " << supremum << " /s";
    throw SaturationError(os.str(), supremum);
  }
  if (!(r > 0.0)) throw DomainError("measured rate must be positive");
  // recovery only ever lengthens the on-time, so R* lies above both r and
  // the step-function inverse
  const double simple = simple_rate_inverse(r, p.tau_d);
  return invert_rate([&](double x) { return er_rate_forward_apriori(x, p); }, r, supremum, r,
                     10.0 * simple);
}

// ---------------------------------------------------------------------------
// Low-rate expansion, R* tau_r << 1
// ---------------------------------------------------------------------------

inline double approx_low_pdf(double t, double r_star, double tau_r) {
  return (1.0 + r_star * tau_r) * numeric::one_minus_exp_neg(t / tau_r) * r_star *
         std::exp(-r_star * t);
}

/// <t> ~ 1/R* + tau_r / (1 + tau_r R*)
inline double approx_low_mean(double r_star, double tau_r) {
  return 1.0 / r_star + tau_r / (1.0 + tau_r * r_star);
}

inline double approx_low_forward(double r_star, const ErParams& p) {
  return 1.0 / (approx_low_mean(r_star, p.tau_r) + p.tau_d);
}

/// R* ~ 1/u + (sqrt(1 + (2 tau_r/u)^2) - 1) / (2 tau_r),  u = 1/R - tau_d.
inline double approx_low_inverse(double r, const ErParams& p) {
  const double u = 1.0 / r - p.tau_d;
  if (!(u > 0.0)) throw SaturationError("measured rate at or above 1/tau_d", 1.0 / p.tau_d);
  const double s = 2.0 * p.tau_r / u;
  // sqrt(1+s^2) - 1 rewritten to avoid cancellation at small s
  const double correction = s * s / (std::sqrt(1.0 + s * s) + 1.0) / (2.0 * p.tau_r);
  return 1.0 / u + correction;
}

// ---------------------------------------------------------------------------
// High-rate expansion, R* tau_r >> 1
// ---------------------------------------------------------------------------

/// Second-order hazard expansion with the cubic term of its integral kept to
/// first order.
inline double approx_high_pdf(double t, double r_star, double tau_r) {
  const double x = t / tau_r;
  return r_star * (x - 0.5 * x * x) * std::exp(-r_star * t * t / (2.0 * tau_r)) *
         (1.0 + r_star * t * t * t / (6.0 * tau_r * tau_r));
}

/// <t> ~ sqrt(pi tau_r / 2R*) + 1/(3R*)
inline double approx_high_mean(double r_star, double tau_r) {
  return std::sqrt(std::numbers::pi * tau_r / (2.0 * r_star)) + 1.0 / (3.0 * r_star);
}

/// Leading-term rate equation R ~ 1 / (sqrt(pi tau_r / 2R*) + tau_d).
inline double approx_high_forward(double r_star, const ErParams& p) {
  return 1.0 / (std::sqrt(std::numbers::pi * p.tau_r / (2.0 * r_star)) + p.tau_d);
}

/// R* ~ (pi tau_r / 2) / (1/R - tau_d)^2
inline double approx_high_inverse(double r, const ErParams& p) {
  const double u = 1.0 / r - p.tau_d;
  if (!(u > 0.0)) throw SaturationError("measured rate at or above 1/tau_d", 1.0 / p.tau_d);
  return 0.5 * std::numbers::pi * p.tau_r / (u * u);
}

}  // namespace erspad

// ============================================================================
// nhpp.hpp -- detector-on time statistics for an arbitrary efficiency
// recovery profile.
//
// After a dead-time window ends (t = 0) photons arrive as a Poisson stream of
// rate r_i and each is detected with probability eta(t). The first detection
// is then the first event of a non-homogeneous Poisson process with
// intensity lambda(t) = r_i eta(t), so
//
//   P(no detection in [0,t]) = exp(-r_i * int_0^t eta)
//   p(t)                     = r_i eta(t) exp(-r_i * int_0^t eta)
//
// and the measured rate follows from the mean on-time <t> as
// R = 1 / (<t> + tau_d).
// ============================================================================
#pragma once

#include <cmath>
#include <concepts>
#include <limits>
#include <sstream>
#include <utility>

#include "erspad/errors.hpp"
#include "erspad/numeric.hpp"

namespace erspad {

/// A time-dependent detection efficiency eta(t) in [0, 1] together with its
/// running integral int_0^t eta.
template <class P>
concept EfficiencyProfile = requires(const P& p, double t) {
  { p.eval(t) } -> std::convertible_to<double>;
  { p.cumulative(t) } -> std::convertible_to<double>;
};

/// Instantaneous recovery: the step-function dead-time window.
struct ConstantEfficiency {
  double eta0 = 1.0;

  double eval(double /*t*/) const { return eta0; }
  double cumulative(double t) const { return eta0 * t; }
};

/// Profile known only pointwise; the cumulative comes from adaptive
/// quadrature.
template <class F>
class NumericEfficiency {
public:
  explicit NumericEfficiency(F eta, double rel_tol = 1e-13)
      : eta_(std::move(eta)), rel_tol_(rel_tol) {}

  double eval(double t) const { return eta_(t); }

  double cumulative(double t) const {
    return numeric::integrate(eta_, 0.0, t, {rel_tol_});
  }

private:
  F eta_;
  double rel_tol_;
};

template <class F>
NumericEfficiency(F) -> NumericEfficiency<F>;

/// A priori rate R* and the dead-time limited measured rate R.
struct RatePair {
  double apriori = 0.0;
  double measured = 0.0;
};

namespace detail {

inline void require_rate_and_time(double r_i, double t) {
  if (!(r_i >= 0.0) || !(t >= 0.0)) {
    std::ostringstream os;
    os << "rate and time must be non-negative (rate " << r_i << ", t " << t << ")";
    throw DomainError(os.str());
  }
}

}  // namespace detail

/// Probability of no detection within [0, t] of the detector-on period.
template <EfficiencyProfile P>
double nhpp_ccdf(const P& profile, double r_i, double t) {
  detail::require_rate_and_time(r_i, t);
  if (r_i == 0.0) return 1.0;
  return std::exp(-r_i * profile.cumulative(t));
}

/// Probability of at least one detection within [0, t].
template <EfficiencyProfile P>
double nhpp_cdf(const P& profile, double r_i, double t) {
  detail::require_rate_and_time(r_i, t);
  if (r_i == 0.0) return 0.0;
  return -std::expm1(-r_i * profile.cumulative(t));
}

/// Density of the detector-on time.
template <EfficiencyProfile P>
double nhpp_pdf(const P& profile, double r_i, double t) {
  detail::require_rate_and_time(r_i, t);
  const double eta = profile.eval(t);
  if (r_i == 0.0 || eta == 0.0) return 0.0;
  return r_i * eta * std::exp(-r_i * profile.cumulative(t));
}

/// Smallest power-of-two multiple of 1/r_i at which the cumulative hazard
/// r_i * int_0^T eta reaches `hazard` (default: survival below 1e-16).
template <EfficiencyProfile P>
double on_time_horizon(const P& profile, double r_i, double hazard = 37.0) {
  if (!(r_i > 0.0)) throw DivergenceError("on-time horizon needs a positive rate");
  double horizon = 1.0 / r_i;
  for (int i = 0; i < 2100; ++i) {
    const double h = r_i * profile.cumulative(horizon);
    if (h >= hazard) {
      // shrink back while the target is still met
      while (r_i * profile.cumulative(0.5 * horizon) >= hazard) horizon *= 0.5;
      return horizon;
    }
    horizon *= 2.0;
    if (!std::isfinite(horizon)) break;
  }
  throw DivergenceError("cumulative efficiency does not diverge; the on-time has no finite mean");
}

/// Mean detector-on time <t> = int_0^inf t p(t) dt.
///
/// Evaluated through the survival identity <t> = int_0^inf P(T > t) dt on
/// [0, T] with P(T > T) < 1e-16, plus the tail bound P(T > T)/lambda(T).
template <EfficiencyProfile P>
double mean_on_time(const P& profile, double r_i, numeric::QuadratureOptions opt = {}) {
  if (r_i < 0.0) throw DomainError("impinging rate must be non-negative");
  if (r_i == 0.0) throw DivergenceError("zero rate: the detector-on time never ends");
  const double horizon = on_time_horizon(profile, r_i);
  auto survival = [&](double t) { return std::exp(-r_i * profile.cumulative(t)); };
  double mean = numeric::integrate_from_zero(survival, horizon, opt);
  const double lambda_end = r_i * profile.eval(horizon);
  if (lambda_end > 0.0) mean += survival(horizon) / lambda_end;
  return mean;
}

/// Measured rate from the mean on-time: R = 1 / (<t> + tau_d).
inline double rate_forward(double mean_on, double tau_d) {
  if (!(mean_on > 0.0)) throw DomainError("mean on-time must be positive");
  if (!(tau_d >= 0.0)) throw DomainError("dead-time must be non-negative");
  return 1.0 / (mean_on + tau_d);
}

/// Step-function model inverse R* = 1 / (1/R - tau_d).
inline double simple_rate_inverse(double r, double tau_d) {
  if (!(tau_d >= 0.0)) throw DomainError("dead-time must be non-negative");
  if (!(r >= 0.0)) throw DomainError("measured rate must be non-negative");
  const double occupancy = r * tau_d;
  if (occupancy >= 1.0) {
    std::ostringstream os;
    os << "measured rate " << r << " /s is at or above the saturation rate 1/tau_d = "
       << 1.0 / tau_d << " /s";
    throw SaturationError(os.str(), 1.0 / tau_d);
  }
  return r / (1.0 - occupancy);
}

/// Step-function model forward map R = 1 / (1/R* + tau_d).
inline double simple_rate_forward(double r_star, double tau_d) {
  if (!(r_star >= 0.0)) throw DomainError("a priori rate must be non-negative");
  return r_star / (1.0 + r_star * tau_d);
}

/// Inverts a strictly increasing rate map R*(->)R at the measured rate `r`.
///
/// [lo, hi] is an initial bracket guess; lo is halved and hi grown tenfold
/// until they bracket the root. `supremum` is the least upper bound of the
/// map, reported when `r` cannot be reached.
template <class Forward>
double invert_rate(Forward&& forward, double r, double supremum, double lo, double hi,
                   double rel_tol = 1e-12) {
  if (!(r > 0.0)) throw DomainError("measured rate must be positive");
  auto saturated = [&] {
    std::ostringstream os;
    os << "measured rate " << r << " /s is not attainable; the rate map is bounded by "
       << supremum << " /s";
    return SaturationError(os.str(), supremum);
  };
  if (r >= supremum) throw saturated();
  if (!(lo > 0.0) || !(hi > lo)) throw DomainError("invalid initial bracket");

  for (int i = 0; forward(lo) > r; ++i) {
    lo *= 0.5;
    if (i > 2000 || lo == 0.0) throw NumericError("could not bracket the inverse from below");
  }
  while (forward(hi) < r) {
    hi *= 10.0;
    if (!std::isfinite(hi) || hi > 1e300) throw saturated();
  }
  return numeric::find_root([&](double x) { return forward(x) - r; }, lo, hi, rel_tol);
}

}  // namespace erspad

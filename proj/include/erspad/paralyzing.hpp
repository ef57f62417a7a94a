// ============================================================================
// paralyzing.hpp -- mean-level paralyzing extension of the ER model.
//
// An avalanche triggered within tau_p1 of the end of the dead-time is too
// weak to be registered but still quenches the bias, prolonging the dead
// period by tau_p2. This can repeat, so with p_p = P(T < tau_p1)
//
//   <n>        = p_p / (1 - p_p)                 (consecutive paralyzations)
//   <t_p^(1)>  = <T | T < tau_p1> + tau_p2       (one prolongation)
//   <t>_par    = <t>_ER + <n> <t_p^(1)>
//
// Only these averages are modelled; there is no paralyzing density.
// ============================================================================
#pragma once

#include <cmath>
#include <sstream>
#include <vector>

#include "erspad/er_model.hpp"
#include "erspad/errors.hpp"
#include "erspad/numeric.hpp"
#include "erspad/optimize.hpp"

namespace erspad {

struct ParalyzingParams {
  double tau_p1 = 0.0;  // paralyzable time after the dead-time [s]
  double tau_p2 = 0.0;  // dead-time extension per paralyzation [s]

  void validate() const {
    if (!(tau_p1 >= 0.0) || !(tau_p2 >= 0.0))
      throw DomainError("paralyzing time constants must be non-negative");
  }
};

/// p_p = P(T < tau_p1) for the ER on-time distribution.
inline double paralyzation_prob(const ParalyzingParams& pp, double r_star, double tau_r) {
  pp.validate();
  return er_cdf(pp.tau_p1, r_star, tau_r);
}

/// <T | T < tau_p1>, the mean on-time of an avalanche that paralyzes.
inline double mean_conditional_on_time(const ParalyzingParams& pp, double r_star, double tau_r) {
  const double p = paralyzation_prob(pp, r_star, tau_r);
  if (!(p > 0.0))
    throw DomainError("paralyzation probability is zero; the conditional mean is undefined");
  auto weighted = [&](double t) { return t * er_pdf(t, r_star, tau_r); };
  const double moment = numeric::integrate(weighted, 0.0, pp.tau_p1, {1e-12});
  return moment / p;
}

/// <t_p^(1)> = <T | T < tau_p1> + tau_p2.
inline double mean_single_prolongation(const ParalyzingParams& pp, double r_star, double tau_r) {
  return mean_conditional_on_time(pp, r_star, tau_r) + pp.tau_p2;
}

/// Mean of the geometric number of consecutive paralyzations.
inline double mean_paralyzation_count(double p_p) {
  if (!(p_p >= 0.0) || !(p_p < 1.0)) throw DomainError("paralyzation probability must lie in [0, 1)");
  return p_p / (1.0 - p_p);
}

/// Mean on-time of the paralyzing ER model.
inline double paralyzing_mean_on_time(const ParalyzingParams& pp, const ErParams& p,
                                      double r_star) {
  pp.validate();
  const double base = er_mean_on_time(r_star, p.tau_r);
  if (pp.tau_p1 == 0.0) return base;
  // p/(1-p) = e^Lambda - 1 stays finite after p itself rounds to 1
  const double count = std::expm1(er_cumulative_hazard(pp.tau_p1, r_star, p.tau_r));
  if (count == 0.0) return base;
  return base + count * mean_single_prolongation(pp, r_star, p.tau_r);
}

/// Measured rate 1 / (<t>_par + tau_d). Not monotone: it rolls over once
/// paralyzations dominate.
inline double paralyzing_rate_forward(const ParalyzingParams& pp, const ErParams& p,
                                      double r_star) {
  return rate_forward(paralyzing_mean_on_time(pp, p, r_star), p.tau_d);
}

/// One measured point of the on-time curve.
struct OnTimePoint {
  double r_star = 0.0;   // a priori rate [1/s]
  double mean_on = 0.0;  // 1/R - tau_d [s]
};

struct ParalyzingFit {
  ParalyzingParams params;
  double sigma_p1 = 0.0;
  double sigma_p2 = 0.0;
  double reduced_chi2 = 0.0;  // weighted SSR / (n - 2)
  int iterations = 0;
};

/// Weighted least-squares fit of (tau_p1, tau_p2) to measured mean on-times
/// with eta0, tau_d and tau_r held fixed. Each point is weighted by 1/r^3,
/// r = 1/(mean_on + tau_d) its measured rate. Uncertainties are 1 sigma from
/// the Gauss-Newton covariance scaled by the residual variance.
inline ParalyzingFit fit_paralyzing(const std::vector<OnTimePoint>& points, const ErParams& p,
                                    ParalyzingParams init = {}) {
  if (points.size() < 3) throw IllPosedError("paralyzing fit needs at least three points");
  if (init.tau_p1 <= 0.0) init.tau_p1 = 0.1 * p.tau_r;
  if (init.tau_p2 <= 0.0) init.tau_p2 = 0.1 * p.tau_r;

  std::vector<double> sqrt_w(points.size());
  double wmax = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].r_star > 0.0) || !(points[i].mean_on > 0.0))
      throw DomainError("points need positive a priori rates and on-times");
    const double r = 1.0 / (points[i].mean_on + p.tau_d);
    sqrt_w[i] = std::pow(r, -1.5);
    wmax = std::max(wmax, sqrt_w[i]);
  }
  for (auto& w : sqrt_w) w /= wmax;

  // internal coordinates: log of both time constants
  auto residuals = [&](const optimize::Vector& x) {
    const ParalyzingParams pp{std::exp(x[0]), std::exp(x[1])};
    optimize::Vector r(static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double model = paralyzing_mean_on_time(pp, p, points[i].r_star);
      r[static_cast<Eigen::Index>(i)] = sqrt_w[i] * (model - points[i].mean_on);
    }
    return r;
  };

  optimize::Vector x0(2);
  x0 << std::log(init.tau_p1), std::log(init.tau_p2);
  const auto ls = optimize::levenberg_marquardt(residuals, x0);
  if (!ls.converged) {
    std::ostringstream os;
    os << "paralyzing fit did not converge after " << ls.iterations << " iterations; residuals:";
    for (Eigen::Index i = 0; i < ls.residuals.size(); ++i) os << ' ' << ls.residuals[i];
    throw FitError(os.str(), ls.trace);
  }

  ParalyzingFit out;
  out.params = {std::exp(ls.x[0]), std::exp(ls.x[1])};
  out.iterations = ls.iterations;
  const double dof = static_cast<double>(points.size()) - 2.0;
  out.reduced_chi2 = dof > 0 ? ls.ssr / dof : 0.0;
  const optimize::Matrix jtj = ls.jacobian.transpose() * ls.jacobian;
  Eigen::FullPivLU<optimize::Matrix> lu(jtj);
  if (lu.isInvertible()) {
    const optimize::Matrix cov = lu.inverse() * out.reduced_chi2;
    out.sigma_p1 = out.params.tau_p1 * std::sqrt(std::max(cov(0, 0), 0.0));
    out.sigma_p2 = out.params.tau_p2 * std::sqrt(std::max(cov(1, 1), 0.0));
  } else {
    throw IllPosedError("paralyzing parameters are not identifiable from these points");
  }
  return out;
}

}  // namespace erspad

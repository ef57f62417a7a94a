// ============================================================================
// fit.hpp -- maximum-likelihood fit of the ER interval density to a
// histogram of inter-detection intervals.
//
// Expected counts per bin are
//   mu_k = scale * total * w * p(c_k - tau_d)        (bin centre, default)
//   mu_k = scale * total * P(bin k)                  (exact bin integral)
// and the objective is the binned Poisson deviance
//   D/2 = sum_k mu_k - n_k + n_k log(n_k / mu_k).
//
// A histogram identifies R* = eta0 r_i (+ dark), tau_d, tau_r and the
// vertical scale; eta0 itself needs a calibrated r_i.
// ============================================================================
#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "erspad/er_model.hpp"
#include "erspad/errors.hpp"
#include "erspad/histogram.hpp"
#include "erspad/numeric.hpp"
#include "erspad/optimize.hpp"

namespace erspad {

enum class FitParam : std::size_t { rate = 0, tau_d = 1, tau_r = 2, scale = 3 };

inline constexpr std::array<std::string_view, 4> fit_param_names = {"rate", "tau_d", "tau_r",
                                                                    "scale"};

/// Which of {R*, tau_d, tau_r, scale} are held at their initial values.
struct FitMask {
  std::array<bool, 4> fixed{};

  bool is_fixed(FitParam p) const { return fixed[static_cast<std::size_t>(p)]; }
  FitMask& fix(FitParam p) {
    fixed[static_cast<std::size_t>(p)] = true;
    return *this;
  }
  std::size_t free_count() const {
    std::size_t n = 0;
    for (bool f : fixed) n += f ? 0 : 1;
    return n;
  }
};

inline std::optional<FitParam> parse_fit_param(std::string_view name) {
  for (std::size_t i = 0; i < fit_param_names.size(); ++i)
    if (fit_param_names[i] == name) return static_cast<FitParam>(i);
  if (name == "rstar" || name == "r_star") return FitParam::rate;
  return std::nullopt;
}

enum class BinModel { center, integral };

/// Starting values; unset entries come from the data.
struct FitInit {
  std::optional<double> r_star;
  std::optional<double> tau_d;
  std::optional<double> tau_r;
  std::optional<double> scale;
};

struct FitOptions {
  BinModel bin_model = BinModel::center;
  std::optional<double> r_i;  // calibrated photon rate, enables eta0
  double dark_apriori = 0.0;  // subtracted from R* before computing eta0
  int max_iter = 500;
};

struct FitResult {
  std::array<double, 4> values{};                 // R*, tau_d, tau_r, scale
  std::array<std::optional<double>, 4> sigma{};  // 1 sigma, free parameters only
  FitMask fixed;
  std::optional<double> eta0;
  std::optional<double> sigma_eta0;
  double deviance = 0.0;
  double dof = 0.0;
  double goodness = 0.0;  // deviance per degree of freedom
  int iterations = 0;
  BinModel bin_model = BinModel::center;

  double r_star() const { return values[0]; }
  double tau_d() const { return values[1]; }
  double tau_r() const { return values[2]; }
  double scale() const { return values[3]; }

  /// Detector triple; eta0 defaults to 1 when no photon-rate calibration was
  /// supplied (R* then plays the role of r_i).
  ErParams params() const { return {eta0.value_or(1.0), tau_d(), tau_r()}; }
};

/// Expected counts per bin for the given model values. Bins at or below the
/// dead-time get zero.
inline std::vector<double> expected_counts(const IntervalHistogram& h,
                                           const std::array<double, 4>& v,
                                           BinModel mode = BinModel::center) {
  const double r_star = v[0], tau_d = v[1], tau_r = v[2], scale = v[3];
  const double norm = scale * static_cast<double>(h.total);
  std::vector<double> mu(h.size(), 0.0);
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double lo = h.left(k) - tau_d;
    const double hi = lo + h.bin_width;
    if (hi <= 0.0) continue;
    if (mode == BinModel::center) {
      const double c = lo + 0.5 * h.bin_width;
      if (c > 0.0) mu[k] = norm * h.bin_width * er_pdf(c, r_star, tau_r);
    } else {
      const double a = std::max(lo, 0.0);
      const double la = er_cumulative_hazard(a, r_star, tau_r);
      const double lb = er_cumulative_hazard(hi, r_star, tau_r);
      mu[k] = norm * std::exp(-la) * -std::expm1(-(lb - la));
    }
  }
  return mu;
}

namespace detail {

struct BinnedPoisson {
  const IntervalHistogram& h;
  BinModel mode;
  std::size_t first_nonzero = 0;

  /// Half the Poisson deviance; +inf when a populated bin has zero
  /// expectation.
  double operator()(const std::array<double, 4>& v) const {
    const double r_star = v[0], tau_d = v[1], tau_r = v[2], scale = v[3];
    if (!(r_star > 0.0) || !(tau_r > 0.0) || !(scale > 0.0) || !std::isfinite(tau_d))
      return std::numeric_limits<double>::infinity();
    const double norm = scale * static_cast<double>(h.total);
    const double w = h.bin_width;
    double sum = 0.0;
    const double start = std::floor((tau_d - h.origin) / w);
    std::size_t k0 = start > 0.0 ? static_cast<std::size_t>(start) : 0;
    if (k0 > first_nonzero) return std::numeric_limits<double>::infinity();
    double la_prev = -1.0;
    for (std::size_t k = k0; k < h.size(); ++k) {
      const double lo = h.left(k) - tau_d;
      const double n = static_cast<double>(h.counts[k]);
      double mu = 0.0;
      if (mode == BinModel::center) {
        const double c = lo + 0.5 * w;
        if (c > 0.0) mu = norm * w * er_pdf(c, r_star, tau_r);
      } else if (lo + w > 0.0) {
        const double la =
            la_prev >= 0.0 ? la_prev : er_cumulative_hazard(std::max(lo, 0.0), r_star, tau_r);
        const double lb = er_cumulative_hazard(lo + w, r_star, tau_r);
        mu = norm * std::exp(-la) * -std::expm1(-(lb - la));
        la_prev = lb;
      }
      if (n > 0.0) {
        if (!(mu > 0.0)) return std::numeric_limits<double>::infinity();
        sum += mu - n + n * std::log(n / mu);
      } else {
        sum += mu;
      }
    }
    return sum;
  }
};

}  // namespace detail

/// Binned Poisson maximum-likelihood fit of the ER interval density.
///
/// Strategy: moment-matched R* on a coarse tau_r grid, Nelder-Mead on
/// (log R*, tau_d in bins, log tau_r, log scale), then Newton polishing.
/// Uncertainties come from the inverse observed information.
inline FitResult fit_er_histogram(const IntervalHistogram& h, FitInit init = {},
                                  FitMask fixed = {}, FitOptions opt = {}) {
  if (h.total == 0) throw IllPosedError("histogram is empty");
  std::size_t populated = 0, first = h.size(), peak = 0;
  double sum_c = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (h.counts[k] == 0) continue;
    ++populated;
    first = std::min(first, k);
    if (h.counts[k] > h.counts[peak]) peak = k;
    sum_c += static_cast<double>(h.counts[k]) * h.center(k);
  }
  if (populated < 2) throw IllPosedError("all counts fall into a single bin; the fit is ill-posed");

  const double w = h.bin_width;
  const double mean_interval = sum_c / static_cast<double>(h.total);
  const double tau_d0 = init.tau_d.value_or(h.center(first) - w);
  double tau_r0 = init.tau_r.value_or(std::max(h.center(peak) - tau_d0, w));
  const double mean_on0 = mean_interval - tau_d0;
  if (!init.r_star && !(mean_on0 > 0.0))
    throw IllPosedError("mean interval does not exceed the dead-time estimate");

  // R* whose ER mean on-time equals the observed one
  auto matched_rate = [&](double tau_r) {
    const double simple = 1.0 / mean_on0;
    auto g = [&](double log_r) { return std::log(er_mean_on_time(std::exp(log_r), tau_r) / mean_on0); };
    double lo = std::log(simple), hi = lo + 1.0;
    while (g(hi) > 0.0) hi += 2.0;
    return std::exp(numeric::find_root(g, lo, hi, 1e-6));
  };
  const bool rate_free = !fixed.is_fixed(FitParam::rate);
  double r_star0 = init.r_star ? *init.r_star : matched_rate(tau_r0);
  const double scale0 = init.scale.value_or(1.0);

  const detail::BinnedPoisson nll{h, opt.bin_model, first};
  std::ostringstream trace;

  if (!fixed.is_fixed(FitParam::tau_r) && !init.tau_r) {
    double best = std::numeric_limits<double>::infinity();
    const double base = tau_r0;
    for (int k = -8; k <= 8; ++k) {
      const double tr = base * std::exp2(0.5 * k);
      const double rs = (rate_free && !init.r_star) ? matched_rate(tr) : r_star0;
      const double f = nll({rs, tau_d0, tr, scale0});
      trace << "grid tau_r " << tr << " r* " << rs << " nll " << f << "\n";
      if (f < best) {
        best = f;
        tau_r0 = tr;
        r_star0 = rs;
      }
    }
  }

  // internal coordinates
  const std::array<double, 4> start{r_star0, tau_d0, tau_r0, scale0};
  auto to_values = [&](const optimize::Vector& x) {
    std::array<double, 4> v = start;
    Eigen::Index j = 0;
    for (std::size_t i = 0; i < 4; ++i) {
      if (fixed.fixed[i]) continue;
      v[i] = i == 1 ? tau_d0 + w * x[j] : start[i] * std::exp(x[j]);
      ++j;
    }
    return v;
  };
  auto objective = [&](const optimize::Vector& x) { return nll(to_values(x)); };

  FitResult out;
  out.fixed = fixed;
  out.bin_model = opt.bin_model;
  const auto nfree = static_cast<Eigen::Index>(fixed.free_count());
  optimize::Vector x = optimize::Vector::Zero(nfree);
  optimize::Matrix hess;
  if (nfree > 0) {
    const std::array<double, 4> steps{0.05, 0.5, 0.1, 0.01};
    optimize::Vector step(nfree);
    for (std::size_t i = 0, j = 0; i < 4; ++i)
      if (!fixed.fixed[i]) step[static_cast<Eigen::Index>(j++)] = steps[i];
    if (!std::isfinite(objective(x)))
      throw IllPosedError("initial parameters give zero probability to observed bins");

    auto nm = optimize::nelder_mead(objective, x, step, {1e-9, opt.max_iter});
    trace << "simplex: " << nm.iterations << " iterations, f " << nm.f << "\n";
    // restart once from the best vertex with a smaller simplex
    auto nm2 = optimize::nelder_mead(objective, nm.x, 0.1 * step, {1e-9, opt.max_iter});
    trace << "simplex restart: " << nm2.iterations << " iterations, f " << nm2.f << "\n";
    out.iterations = nm.iterations + nm2.iterations;

    auto polished = optimize::newton_polish(objective, nm2.x);
    trace << "newton: " << polished.iterations << " iterations, f " << polished.f
          << (polished.converged ? " converged" : " not converged") << "\n";
    out.iterations += polished.iterations;
    if (!polished.converged && !(nm.converged || nm2.converged))
      throw FitError("histogram fit did not converge", trace.str());
    x = polished.x;
    hess = polished.hessian;
  }

  out.values = to_values(x);
  const double half_dev = nll(out.values);
  out.deviance = 2.0 * half_dev;

  std::size_t used = 0;
  const auto mu = expected_counts(h, out.values, opt.bin_model);
  for (std::size_t k = 0; k < h.size(); ++k)
    if (mu[k] > 0.0 || h.counts[k] > 0) ++used;
  out.dof = static_cast<double>(used) - static_cast<double>(nfree);
  out.goodness = out.dof > 0 ? out.deviance / out.dof : 0.0;

  if (nfree > 0) {
    Eigen::LLT<optimize::Matrix> llt(hess);
    if (llt.info() != Eigen::Success)
      throw FitError("observed information is not positive definite at the optimum", trace.str());
    const optimize::Matrix cov = llt.solve(optimize::Matrix::Identity(nfree, nfree));
    for (std::size_t i = 0, j = 0; i < 4; ++i) {
      if (fixed.fixed[i]) continue;
      const double sd = std::sqrt(cov(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)));
      out.sigma[i] = i == 1 ? w * sd : out.values[i] * sd;
      ++j;
    }
  }
  if (opt.r_i) {
    if (!(*opt.r_i > 0.0)) throw DomainError("calibrated photon rate must be positive");
    out.eta0 = (out.r_star() - opt.dark_apriori) / *opt.r_i;
    if (out.sigma[0]) out.sigma_eta0 = *out.sigma[0] / *opt.r_i;
  }
  return out;
}

}  // namespace erspad

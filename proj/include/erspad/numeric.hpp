// ============================================================================
// numeric.hpp -- quadrature, bracketed root finding and a few numerically
// stable elementary helpers used by the model code.
// ============================================================================
#pragma once

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <cstdint>
#include <limits>
#include <sstream>
#include <utility>

#include "erspad/errors.hpp"

namespace erspad::numeric {

/// 1 - exp(-x) without cancellation for small x.
inline double one_minus_exp_neg(double x) { return -std::expm1(-x); }

/// x - (1 - exp(-x)), the integral of 1 - exp(-s) over [0, x].
/// Behaves like x^2/2 near zero, where the direct form cancels badly.
inline double recovery_ramp(double x) {
  if (x < 0.5) {
    // alternating series sum_{k>=2} (-x)^k / k!
    double term = x * x / 2.0;
    double sum = term;
    for (int k = 3; k < 30; ++k) {
      term *= -x / k;
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return x + std::expm1(-x);
}

struct QuadratureOptions {
  double rel_tol = 1e-13;
  double abs_tol = 0.0;
  std::size_t max_panels = 4000;
};

namespace detail {

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

/// Single G7/K15 panel with the QUADPACK error heuristic.
template <class F>
Panel gauss_kronrod_panel(F& f, double a, double b) {
  using kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
  using gauss = boost::math::quadrature::gauss<double, 7>;
  const auto& x = kronrod::abscissa();
  const auto& wk = kronrod::weights();
  const auto& wg = gauss::weights();

  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, 15> fv{};
  fv[0] = f(center);
  double resk = fv[0] * wk[0];
  double resg = fv[0] * wg[0];
  double resabs = std::abs(resk);
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double fp = f(center + half * x[i]);
    const double fm = f(center - half * x[i]);
    fv[2 * i - 1] = fp;
    fv[2 * i] = fm;
    resk += (fp + fm) * wk[i];
    resabs += (std::abs(fp) + std::abs(fm)) * wk[i];
    if (i % 2 == 0) resg += (fp + fm) * wg[i / 2];
  }
  const double mean = 0.5 * resk;
  double resasc = wk[0] * std::abs(fv[0] - mean);
  for (std::size_t i = 1; i < x.size(); ++i)
    resasc += wk[i] * (std::abs(fv[2 * i - 1] - mean) + std::abs(fv[2 * i] - mean));

  resk *= half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);
  double err = std::abs((resk - resg * half));
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
    err = std::max(50.0 * eps * resabs, err);
  return {a, b, resk, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (G7/K15) integral of f over [a, b]: the
/// panel with the largest error estimate is bisected until the summed
/// estimate falls below max(abs_tol, rel_tol * |I|).
/// Throws NumericError when the panel budget runs out first.
template <class F>
double integrate(F&& f, double a, double b, QuadratureOptions opt = {}) {
  if (a == b) return 0.0;
  std::priority_queue<detail::Panel> panels;
  panels.push(detail::gauss_kronrod_panel(f, a, b));
  double value = panels.top().value;
  double error = panels.top().error;
  // rounding floor: once panels reach ~eps relative error further bisection
  // cannot help
  constexpr double eps = std::numeric_limits<double>::epsilon();
  while (error > std::max(opt.abs_tol, opt.rel_tol * std::abs(value))) {
    if (panels.size() >= opt.max_panels) {
      if (error <= 100.0 * eps * std::abs(value)) break;
      std::ostringstream os;
      os << "quadrature did not converge on [" << a << ", " << b << "]: estimate " << value
         << ", error " << error << " after " << panels.size() << " panels, tolerance "
         << opt.rel_tol;
      throw NumericError(os.str());
    }
    const detail::Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const auto left = detail::gauss_kronrod_panel(f, worst.a, mid);
    const auto right = detail::gauss_kronrod_panel(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }
  if (!std::isfinite(value)) throw NumericError("quadrature produced a non-finite value");
  // recompute the sum to shed accumulated update rounding
  double sum = 0.0;
  while (!panels.empty()) {
    sum += panels.top().value;
    panels.pop();
  }
  return sum;
}

/// Integral over [0, upper] split at upper/2, upper/4, ... so that features
/// at widely different time scales each get their own panel.
template <class F>
double integrate_from_zero(F&& f, double upper, QuadratureOptions opt = {},
                           int levels = 48) {
  double total = 0.0;
  double hi = upper;
  for (int k = 0; k < levels; ++k) {
    const double lo = hi * 0.5;
    total += integrate(f, lo, hi, opt);
    hi = lo;
  }
  total += integrate(f, 0.0, hi, opt);
  return total;
}

/// Root of a continuous f on the bracket [lo, hi] (f(lo), f(hi) of opposite
/// sign) by TOMS 748: bisection interleaved with secant and inverse cubic
/// interpolation steps.
template <class F>
double find_root(F&& f, double lo, double hi, double rel_tol = 1e-12,
                 std::uintmax_t max_iter = 300) {
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0)) {
    std::ostringstream os;
    os << "root not bracketed by [" << lo << ", " << hi << "]";
    throw NumericError(os.str());
  }
  std::uintmax_t iters = max_iter;
  auto tol = [rel_tol](double x, double y) {
    return std::abs(x - y) <= rel_tol * std::min(std::abs(x), std::abs(y));
  };
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  if (iters >= max_iter) {
    std::ostringstream os;
    os << "root finder exhausted " << max_iter << " iterations, bracket [" << a << ", " << b
       << "]";
    throw NumericError(os.str());
  }
  return 0.5 * (a + b);
}

}  // namespace erspad::numeric

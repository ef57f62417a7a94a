// ============================================================================
// optimize.hpp -- small dense optimizers for low-dimensional fits:
// Nelder-Mead simplex, finite-difference derivatives, Newton polishing and
// Levenberg-Marquardt least squares.
// ============================================================================
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "erspad/errors.hpp"

namespace erspad::optimize {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct NelderMeadOptions {
  double x_tol = 1e-9;  // simplex extent in internal coordinates
  int max_iter = 500;
};

struct NelderMeadResult {
  Vector x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Nelder-Mead downhill simplex (reflection 1, expansion 2, contraction 1/2,
/// shrink 1/2). The initial simplex is x0 plus `step[i]` along each axis.
/// Non-finite objective values count as +infinity.
template <class F>
NelderMeadResult nelder_mead(F&& objective, const Vector& x0, const Vector& step,
                             NelderMeadOptions opt = {}) {
  const auto n = x0.size();
  auto eval = [&](const Vector& x) {
    const double v = objective(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };
  std::vector<Vector> pts(n + 1, x0);
  std::vector<double> fv(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) pts[i + 1][i] += step[i];
  for (Eigen::Index i = 0; i <= n; ++i) fv[i] = eval(pts[i]);

  std::vector<Eigen::Index> order(n + 1);
  NelderMeadResult res;
  for (res.iterations = 0; res.iterations < opt.max_iter; ++res.iterations) {
    for (Eigen::Index i = 0; i <= n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
    const auto best = order.front();
    const auto worst = order.back();
    const auto second = order[n - 1];

    double extent = 0.0;
    for (Eigen::Index i = 0; i <= n; ++i)
      extent = std::max(extent, (pts[i] - pts[best]).cwiseAbs().maxCoeff());
    if (extent < opt.x_tol && std::isfinite(fv[best])) {
      res.converged = true;
      break;
    }

    Vector centroid = Vector::Zero(n);
    for (Eigen::Index i = 0; i <= n; ++i)
      if (i != worst) centroid += pts[i];
    centroid /= static_cast<double>(n);

    const Vector reflected = centroid + (centroid - pts[worst]);
    const double fr = eval(reflected);
    if (fr < fv[best]) {
      const Vector expanded = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = eval(expanded);
      if (fe < fr) {
        pts[worst] = expanded;
        fv[worst] = fe;
      } else {
        pts[worst] = reflected;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      pts[worst] = reflected;
      fv[worst] = fr;
      continue;
    }
    const bool outside = fr < fv[worst];
    const Vector contracted = outside ? Vector(centroid + 0.5 * (reflected - centroid))
                                      : Vector(centroid + 0.5 * (pts[worst] - centroid));
    const double fc = eval(contracted);
    if (fc < (outside ? fr : fv[worst])) {
      pts[worst] = contracted;
      fv[worst] = fc;
      continue;
    }
    for (Eigen::Index i = 0; i <= n; ++i) {
      if (i == best) continue;
      pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
      fv[i] = eval(pts[i]);
    }
  }
  const auto best = std::min_element(fv.begin(), fv.end()) - fv.begin();
  res.x = pts[best];
  res.f = fv[best];
  return res;
}

/// Central-difference gradient with per-coordinate steps h.
template <class F>
Vector gradient(F&& f, const Vector& x, const Vector& h) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp[i] += h[i];
    xm[i] -= h[i];
    g[i] = (f(xp) - f(xm)) / (2.0 * h[i]);
  }
  return g;
}

/// Central-difference Hessian with per-coordinate steps h.
template <class F>
Matrix hessian(F&& f, const Vector& x, const Vector& h) {
  const auto n = x.size();
  Matrix hess(n, n);
  const double f0 = f(x);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector xp = x, xm = x;
    xp[i] += h[i];
    xm[i] -= h[i];
    hess(i, i) = (f(xp) - 2.0 * f0 + f(xm)) / (h[i] * h[i]);
    for (Eigen::Index j = 0; j < i; ++j) {
      Vector pp = x, pm = x, mp = x, mm = x;
      pp[i] += h[i], pp[j] += h[j];
      pm[i] += h[i], pm[j] -= h[j];
      mp[i] -= h[i], mp[j] += h[j];
      mm[i] -= h[i], mm[j] -= h[j];
      hess(i, j) = hess(j, i) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h[i] * h[j]);
    }
  }
  return hess;
}

/// Finite-difference steps matched to the local curvature: a step of
/// `fraction` standard deviations when f is a negative log-likelihood.
template <class F>
Vector curvature_steps(F&& f, const Vector& x, double initial = 1e-4, double fraction = 0.1) {
  Vector h = Vector::Constant(x.size(), initial);
  const double f0 = f(x);
  for (int pass = 0; pass < 3; ++pass) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      Vector xp = x, xm = x;
      xp[i] += h[i];
      xm[i] -= h[i];
      const double curv = (f(xp) - 2.0 * f0 + f(xm)) / (h[i] * h[i]);
      if (curv > 0.0 && std::isfinite(curv)) h[i] = fraction / std::sqrt(curv);
    }
  }
  return h;
}

struct NewtonResult {
  Vector x;
  double f = 0.0;
  Matrix hessian;
  int iterations = 0;
  bool converged = false;
};

/// Damped Newton iterations on a smooth objective from a point already near
/// its minimum. Stops when the Newton decrement g'H^-1 g falls below
/// `decrement_tol` or the step falls below `x_tol`.
template <class F>
NewtonResult newton_polish(F&& f, Vector x, int max_iter = 30, double x_tol = 1e-9,
                           double decrement_tol = 1e-10) {
  NewtonResult res;
  double fx = f(x);
  for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
    const Vector h = curvature_steps(f, x);
    const Vector g = gradient(f, x, h);
    const Matrix hess = hessian(f, x, h);
    Eigen::LLT<Matrix> llt(hess);
    if (llt.info() != Eigen::Success) break;
    const Vector step = -llt.solve(g);
    const double decrement = -g.dot(step);
    if (decrement < decrement_tol || step.cwiseAbs().maxCoeff() < x_tol) {
      res.converged = true;
      break;
    }
    double alpha = 1.0;
    bool improved = false;
    for (int k = 0; k < 20; ++k, alpha *= 0.5) {
      const Vector trial = x + alpha * step;
      const double ft = f(trial);
      if (std::isfinite(ft) && ft <= fx) {
        x = trial;
        fx = ft;
        improved = true;
        break;
      }
    }
    if (!improved) {
      // no descent along the Newton direction: we sit at the numerical floor
      res.converged = decrement < 1e-4;
      break;
    }
  }
  res.x = x;
  res.f = fx;
  const Vector h = curvature_steps(f, x);
  res.hessian = hessian(f, x, h);
  return res;
}

struct LeastSquaresOptions {
  double fd_step = 1e-6;  // forward-difference step in internal coordinates
  double x_tol = 1e-10;
  int max_iter = 200;
};

struct LeastSquaresResult {
  Vector x;
  Vector residuals;
  Matrix jacobian;
  double ssr = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string trace;
};

template <class R>
Matrix forward_jacobian(R&& residuals, const Vector& x, const Vector& r0, double step) {
  Matrix jac(r0.size(), x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Vector xp = x;
    xp[j] += step;
    jac.col(j) = (residuals(xp) - r0) / step;
  }
  return jac;
}

/// Levenberg-Marquardt with Marquardt diagonal scaling: a trust-region
/// Gauss-Newton scheme on the finite-difference Jacobian.
template <class R>
LeastSquaresResult levenberg_marquardt(R&& residuals, Vector x, LeastSquaresOptions opt = {}) {
  LeastSquaresResult res;
  std::ostringstream trace;
  Vector r = residuals(x);
  double ssr = r.squaredNorm();
  double lambda = 1e-3;
  if (!std::isfinite(ssr)) throw FitError("residuals are not finite at the starting point", "");
  for (res.iterations = 0; res.iterations < opt.max_iter; ++res.iterations) {
    const Matrix jac = forward_jacobian(residuals, x, r, opt.fd_step);
    const Matrix jtj = jac.transpose() * jac;
    const Vector jtr = jac.transpose() * r;
    Vector diag = jtj.diagonal().cwiseMax(1e-300);
    bool accepted = false;
    Vector step;
    for (int tries = 0; tries < 40; ++tries) {
      Matrix a = jtj;
      a.diagonal() += lambda * diag;
      step = -a.ldlt().solve(jtr);
      const Vector trial = x + step;
      const Vector rt = residuals(trial);
      const double st = rt.squaredNorm();
      if (std::isfinite(st) && st <= ssr) {
        x = trial;
        r = rt;
        const double drop = ssr - st;
        ssr = st;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        trace << "iter " << res.iterations << " ssr " << ssr << " lambda " << lambda << "\n";
        if (drop <= 1e-15 * ssr) step.setZero();
        break;
      }
      lambda *= 4.0;
    }
    if (!accepted || step.cwiseAbs().maxCoeff() < opt.x_tol * (1.0 + x.cwiseAbs().maxCoeff())) {
      res.converged = true;
      break;
    }
  }
  res.x = x;
  res.residuals = r;
  res.ssr = ssr;
  res.jacobian = forward_jacobian(residuals, x, r, opt.fd_step);
  res.trace = trace.str();
  return res;
}

}  // namespace erspad::optimize

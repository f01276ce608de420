#pragma once

// Small-dimension quasi-Newton (BFGS) minimizer with central-difference
// gradients and Armijo backtracking. Dimensions 1 and 2 are all the
// likelihoods need; the state is kept in fixed arrays.

#include <array>
#include <cmath>
#include <limits>

namespace g0gd {

struct MinimizeOptions {
  int max_iterations = 500;
  double grad_tol = 1e-8;  // converged when ||g||_inf <= grad_tol * (1 + |f|)
  // accepted when the line search stalls with the gradient below this floor;
  // flat-ridge points that sneak through land outside the feasibility box
  double stall_tol = 1e-5;
};

struct MinimizeResult {
  std::array<double, 2> x{};
  double f = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

namespace detail {

template <class F>
std::array<double, 2> fd_gradient(F& f, const std::array<double, 2>& x, int dim) {
  static const double kCbrtEps = std::cbrt(std::numeric_limits<double>::epsilon());
  std::array<double, 2> g{};
  for (int i = 0; i < dim; ++i) {
    const double h = kCbrtEps * (1.0 + std::fabs(x[i]));
    auto xp = x;
    auto xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

}  // namespace detail

// Minimizes f over the first `dim` coordinates of x0. f takes
// std::array<double,2> and may return +inf outside its useful region;
// the line search treats that as "too far".
template <class F>
MinimizeResult minimize_bfgs(F&& f, std::array<double, 2> x0, int dim,
                             const MinimizeOptions& opt = {}) {
  MinimizeResult res;
  std::array<double, 2> x = x0;
  double fx = f(x);
  std::array<double, 2> g = detail::fd_gradient(f, x, dim);
  // inverse Hessian approximation, row-major
  std::array<double, 4> h = {1.0, 0.0, 0.0, 1.0};

  const auto grad_norm = [&](const std::array<double, 2>& grad) {
    double norm = 0.0;
    for (int i = 0; i < dim; ++i) norm = std::max(norm, std::fabs(grad[i]));
    return norm;
  };
  const auto grad_small = [&](const std::array<double, 2>& grad, double fval) {
    return grad_norm(grad) <= opt.grad_tol * (1.0 + std::fabs(fval));
  };

  const auto line_search = [&](const std::array<double, 2>& d, double gd,
                               std::array<double, 2>& xn, double& fn) {
    constexpr double kC1 = 1e-4;
    double t = 1.0;
    for (int ls = 0; ls < 60; ++ls) {
      xn = x;
      for (int i = 0; i < dim; ++i) xn[i] = x[i] + t * d[i];
      fn = f(xn);
      if (fn <= fx + kC1 * t * gd) return true;
      t *= 0.5;
    }
    return false;
  };

  const auto capped = [&](std::array<double, 2> d) {
    const double dnorm = std::max(std::fabs(d[0]), std::fabs(d[1]));
    if (dnorm > 5.0) {
      const double scale = 5.0 / dnorm;
      d[0] *= scale;
      d[1] *= scale;
    }
    return d;
  };

  int iter = 0;
  for (; iter < opt.max_iterations; ++iter) {
    if (grad_small(g, fx)) {
      res.converged = true;
      break;
    }
    // direction d = -H g, falling back to steepest descent when H is no
    // longer positive definite
    std::array<double, 2> d{};
    d[0] = -(h[0] * g[0] + h[1] * g[1]);
    if (dim == 2) d[1] = -(h[2] * g[0] + h[3] * g[1]);
    if (!(g[0] * d[0] + g[1] * d[1] < 0.0)) {
      h = {1.0, 0.0, 0.0, 1.0};
      d[0] = -g[0];
      d[1] = dim == 2 ? -g[1] : 0.0;
    }
    d = capped(d);
    double gd = g[0] * d[0] + g[1] * d[1];
    std::array<double, 2> xn{};
    double fn = 0.0;
    bool ok = line_search(d, gd, xn, fn);
    if (!ok && (h[0] != 1.0 || h[1] != 0.0 || h[2] != 0.0 || h[3] != 1.0)) {
      // a stale curvature model can produce hopeless directions; retry the
      // step along the raw gradient before giving up
      h = {1.0, 0.0, 0.0, 1.0};
      d = capped({-g[0], dim == 2 ? -g[1] : 0.0});
      gd = g[0] * d[0] + g[1] * d[1];
      ok = line_search(d, gd, xn, fn);
    }
    if (!ok) {
      res.converged = grad_norm(g) <= opt.stall_tol * (1.0 + std::fabs(fx));
      break;
    }
    const std::array<double, 2> gn = detail::fd_gradient(f, xn, dim);
    // BFGS inverse update with s = xn - x, y = gn - g
    std::array<double, 2> s{xn[0] - x[0], xn[1] - x[1]};
    std::array<double, 2> y{gn[0] - g[0], gn[1] - g[1]};
    const double sy = s[0] * y[0] + s[1] * y[1];
    const double ss = std::sqrt(s[0] * s[0] + s[1] * s[1]);
    const double yy = std::sqrt(y[0] * y[0] + y[1] * y[1]);
    if (sy > 1e-12 * ss * yy) {
      if (dim == 1) {
        h[0] = s[0] / y[0];
      } else {
        const double rho = 1.0 / sy;
        // A = I - rho s y^T; H <- A H A^T + rho s s^T
        const std::array<double, 4> a = {1.0 - rho * s[0] * y[0], -rho * s[0] * y[1],
                                         -rho * s[1] * y[0], 1.0 - rho * s[1] * y[1]};
        const std::array<double, 4> ah = {
            a[0] * h[0] + a[1] * h[2], a[0] * h[1] + a[1] * h[3],
            a[2] * h[0] + a[3] * h[2], a[2] * h[1] + a[3] * h[3]};
        h = {ah[0] * a[0] + ah[1] * a[1] + rho * s[0] * s[0],
             ah[0] * a[2] + ah[1] * a[3] + rho * s[0] * s[1],
             ah[2] * a[0] + ah[3] * a[1] + rho * s[1] * s[0],
             ah[2] * a[2] + ah[3] * a[3] + rho * s[1] * s[1]};
      }
    }
    x = xn;
    fx = fn;
    g = gn;
  }
  res.x = x;
  res.f = fx;
  res.iterations = iter;
  if (!res.converged) res.converged = grad_small(g, fx);
  return res;
}

}  // namespace g0gd

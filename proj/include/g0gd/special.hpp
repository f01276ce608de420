#pragma once

// Special functions backing the likelihoods and the chi-squared calibration:
// log-gamma and digamma on the positive axis, chi2(1) upper tail.

#include <cmath>
#include <stdexcept>

namespace g0gd {

// log Gamma(x) for x > 0. Uses lgamma_r where available so concurrent
// callers never touch the signgam global.
inline double log_gamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("log_gamma: argument must be > 0");
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

// Digamma psi(x) = d/dx log Gamma(x) for x > 0.
// Recurrence up to x >= 10, then the Bernoulli asymptotic series; relative
// error is below 1e-13 across (0, 1e8).
inline double digamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("digamma: argument must be > 0");
  double acc = 0.0;
  while (x < 10.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double series =
      std::log(x) - 0.5 * inv -
      inv2 * (1.0 / 12.0 -
      inv2 * (1.0 / 120.0 -
      inv2 * (1.0 / 252.0 -
      inv2 * (1.0 / 240.0 -
      inv2 * (1.0 / 132.0 -
      inv2 * (691.0 / 32760.0))))));
  return acc + series;
}

// Upper tail P(X > t) of the chi-squared distribution with one degree of
// freedom: for X = Z^2, Z ~ N(0,1), P(X > t) = erfc(sqrt(t/2)).
inline double chi2_1_sf(double t) {
  if (!(t >= 0.0)) throw std::domain_error("chi2_1_sf: t must be >= 0");
  return std::erfc(std::sqrt(0.5 * t));
}

// 0.95 quantile of chi2(1), the cutoff used throughout for 5% level tests.
inline constexpr double kChi2_1_Q95 = 3.841459;

}  // namespace g0gd

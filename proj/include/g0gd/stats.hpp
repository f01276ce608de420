#pragma once

// Two-sample test statistics built on the geodesic distances:
// T = (mn/(m+n)) s^2 for one free parameter (asymptotically chi2(1) under
// H0) and the composite two-parameter statistics T1, T2, T3 calibrated by
// permutation.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "g0gd/errors.hpp"
#include "g0gd/geodesic.hpp"
#include "g0gd/mle.hpp"
#include "g0gd/special.hpp"

namespace g0gd {

enum class Statistic { TAlpha, TGamma, T1, T2, T3 };
enum class Calibration { Chi2Asymptotic, Permutation };

// Which alpha indexes the scale metric inside the composite statistics.
enum class MetricAlpha { PooledMean, First, Second };

inline const char* to_string(Statistic s) {
  switch (s) {
    case Statistic::TAlpha: return "Talpha";
    case Statistic::TGamma: return "Tgamma";
    case Statistic::T1: return "T1";
    case Statistic::T2: return "T2";
    case Statistic::T3: return "T3";
  }
  return "?";
}

inline Statistic statistic_from_string(const std::string& s) {
  if (s == "Talpha") return Statistic::TAlpha;
  if (s == "Tgamma") return Statistic::TGamma;
  if (s == "T1") return Statistic::T1;
  if (s == "T2") return Statistic::T2;
  if (s == "T3") return Statistic::T3;
  throw std::domain_error("unknown statistic: " + s);
}

inline const char* to_string(Calibration c) {
  return c == Calibration::Chi2Asymptotic ? "chi2_asymptotic" : "permutation";
}

struct TestOutcome {
  Statistic statistic = Statistic::T1;
  double value = 0.0;
  int m = 0;
  int n = 0;
  double p_value = 1.0;
  Calibration calibration = Calibration::Chi2Asymptotic;
};

namespace detail {

inline double size_factor(int m, int n) {
  if (m < 1 || n < 1) throw std::domain_error("test statistic: m, n must be >= 1");
  return static_cast<double>(m) * static_cast<double>(n) /
         (static_cast<double>(m) + static_cast<double>(n));
}

inline void require_converged(const FitResult& f, const char* who) {
  if (!f.converged)
    throw fit_failure_error(std::string(who) + ": fit did not converge");
  // estimates inside the metric's ill-conditioned band count as failures
  if (!(f.params_hat.alpha <= kAlphaCeiling))
    throw fit_failure_error(std::string(who) +
                            ": texture estimate too close to zero");
}

inline void require_feasible_both(const FitResult& f, const char* who) {
  if (f.regime != Regime::Both)
    throw fit_failure_error(std::string(who) + ": fits must come from regime Both");
  if (!f.feasible)
    throw fit_failure_error(std::string(who) + ": fit is infeasible");
}

}  // namespace detail

// T_alpha = (mn/(m+n)) s(alpha1_hat, alpha2_hat)^2.
inline double t_alpha(const FitResult& fit1, const FitResult& fit2, int m, int n,
                      double looks) {
  detail::require_converged(fit1, "t_alpha");
  detail::require_converged(fit2, "t_alpha");
  if (fit1.params_hat.looks != looks || fit2.params_hat.looks != looks)
    throw std::domain_error("t_alpha: fits must share the given looks");
  const double s = dist_alpha(fit1.params_hat.alpha, fit2.params_hat.alpha, looks);
  return detail::size_factor(m, n) * s * s;
}

// T_gamma = (mn/(m+n)) s(gamma1_hat, gamma2_hat)^2 with the metric indexed
// by alpha_for_metric.
inline double t_gamma(const FitResult& fit1, const FitResult& fit2, int m, int n,
                      double alpha_for_metric, double looks) {
  detail::require_converged(fit1, "t_gamma");
  detail::require_converged(fit2, "t_gamma");
  const double s = dist_gamma(fit1.params_hat.gamma, fit2.params_hat.gamma,
                              alpha_for_metric, looks);
  return detail::size_factor(m, n) * s * s;
}

// Asymptotic p-value under H0: both one-parameter statistics follow chi2(1).
inline double p_value_chi2(double t) { return chi2_1_sf(t); }

// Combination arithmetic on the (T_alpha, T_gamma) components. T3 is +inf
// when exactly one component is zero (ranked above every finite value) and
// undefined when both are.
inline double combine_statistics(Statistic kind, double ta, double tg) {
  switch (kind) {
    case Statistic::T1:
      return std::sqrt(ta * ta + tg * tg);
    case Statistic::T2:
      return 0.5 * (ta + tg);
    case Statistic::T3:
      if (ta == 0.0 && tg == 0.0)
        throw degenerate_statistic_error(
            "T3: undefined when both components vanish");
      if (ta == 0.0 || tg == 0.0)
        return std::numeric_limits<double>::infinity();
      return std::max(ta / tg, tg / ta);
    default:
      throw std::domain_error("combine_statistics: kind must be T1, T2 or T3");
  }
}

inline double metric_alpha_value(MetricAlpha choice, double alpha1, double alpha2) {
  switch (choice) {
    case MetricAlpha::PooledMean: return 0.5 * (alpha1 + alpha2);
    case MetricAlpha::First: return alpha1;
    case MetricAlpha::Second: return alpha2;
  }
  return 0.5 * (alpha1 + alpha2);
}

// Composite statistic from two regime-Both fits. The scale metric is
// indexed by the pooled mean of the texture estimates unless configured
// otherwise.
inline double t_combined(Statistic kind, const FitResult& fit1,
                         const FitResult& fit2, int m, int n, double looks,
                         MetricAlpha metric_alpha = MetricAlpha::PooledMean) {
  detail::require_feasible_both(fit1, "t_combined");
  detail::require_feasible_both(fit2, "t_combined");
  const double ta = t_alpha(fit1, fit2, m, n, looks);
  const double am = metric_alpha_value(metric_alpha, fit1.params_hat.alpha,
                                       fit2.params_hat.alpha);
  const double tg = t_gamma(fit1, fit2, m, n, am, looks);
  return combine_statistics(kind, ta, tg);
}

}  // namespace g0gd

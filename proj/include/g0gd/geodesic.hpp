#pragma once

// Geodesic distances between G0 models with one free parameter and L known:
// the texture distance (closed forms for L in {1,2}, adaptive quadrature for
// larger integer L) and the alpha-dependent scale distance.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "g0gd/quadrature.hpp"

namespace g0gd {

enum class DistBranch { ClosedFormL1, ClosedFormL2, Quadrature, ClosedFormGamma };

inline const char* to_string(DistBranch b) {
  switch (b) {
    case DistBranch::ClosedFormL1: return "closed-form-L1";
    case DistBranch::ClosedFormL2: return "closed-form-L2";
    case DistBranch::Quadrature: return "quadrature";
    case DistBranch::ClosedFormGamma: return "closed-form";
  }
  return "?";
}

struct GeodesicSpec {
  double looks = 1.0;
  std::optional<double> fixed_alpha;  // required for the scale distance

  void validate() const {
    if (!(looks >= 1.0)) throw std::domain_error("GeodesicSpec: looks must be >= 1");
    if (fixed_alpha && !(*fixed_alpha < 0.0))
      throw std::domain_error("GeodesicSpec: fixed_alpha must be < 0");
  }
};

struct AlphaDistance {
  double value = 0.0;
  DistBranch branch = DistBranch::Quadrature;
  bool rounded_looks = false;  // set when a fractional L was rounded
};

namespace detail {

// The integrand sqrt(sum_{n=1..L} (-a + n - 1)^-2) is ill-conditioned as
// a -> 0-, so such inputs are rejected outright.
inline constexpr double kAlphaCeiling = -1e-3;

inline void check_alpha(double a, const char* who) {
  if (!(a < 0.0)) throw std::domain_error(std::string(who) + ": alpha must be < 0");
  if (!(a <= kAlphaCeiling))
    throw std::domain_error(std::string(who) +
                            ": alpha > -1e-3 is ill-conditioned");
}

// Antiderivative of sqrt(1/a^2 + 1/(a-1)^2) on a < 0, written to avoid
// cancellation for very negative a. With q = 2a^2 - 2a + 1:
//   F(a) = -sqrt(2) ln(hypot(2a-1, 1) - (2a-1))
//          + ln((1 - a + sqrt(q)) (sqrt(q) - a) / ((-a)(1 - a))).
inline double texture_antiderivative_l2(double a) {
  const double q = 2.0 * a * a - 2.0 * a + 1.0;
  const double sq = std::sqrt(q);
  const double w = 2.0 * a - 1.0;
  const double t1 = -std::sqrt(2.0) * std::log(std::hypot(w, 1.0) - w);
  const double t2 =
      std::log((1.0 - a + sq) * (sq - a) / ((-a) * (1.0 - a)));
  return t1 + t2;
}

inline int rounded_integer_looks(double looks, bool* rounded) {
  const double nearest = std::nearbyint(looks);
  *rounded = std::fabs(looks - nearest) > 1e-9;
  return static_cast<int>(nearest < 1.0 ? 1.0 : nearest);
}

}  // namespace detail

// Numeric route for the texture distance: adaptive quadrature of the
// information-metric line element. Public so callers can cross-check the
// closed forms against it.
inline double dist_alpha_quadrature(double alpha1, double alpha2, double looks) {
  detail::check_alpha(alpha1, "dist_alpha");
  detail::check_alpha(alpha2, "dist_alpha");
  if (!(looks >= 1.0)) throw std::domain_error("dist_alpha: looks must be >= 1");
  bool rounded = false;
  const int L = detail::rounded_integer_looks(looks, &rounded);
  if (alpha1 == alpha2) return 0.0;
  const auto integrand = [L](double a) {
    double s = 0.0;
    for (int n = 1; n <= L; ++n) {
      const double d = -a + (n - 1);
      s += 1.0 / (d * d);
    }
    return std::sqrt(s);
  };
  return std::fabs(integrate_adaptive(integrand, alpha1, alpha2, 1e-10, 1e-12));
}

// Texture distance with branch information. Closed forms for L in {1,2},
// quadrature otherwise; fractional looks are rounded to the nearest integer
// and flagged.
inline AlphaDistance dist_alpha_info(double alpha1, double alpha2, double looks) {
  detail::check_alpha(alpha1, "dist_alpha");
  detail::check_alpha(alpha2, "dist_alpha");
  if (!(looks >= 1.0)) throw std::domain_error("dist_alpha: looks must be >= 1");
  AlphaDistance out;
  const int L = detail::rounded_integer_looks(looks, &out.rounded_looks);
  if (L == 1) {
    out.branch = DistBranch::ClosedFormL1;
    out.value = std::fabs(std::log(alpha1 / alpha2));
  } else if (L == 2) {
    out.branch = DistBranch::ClosedFormL2;
    out.value = std::fabs(detail::texture_antiderivative_l2(alpha2) -
                          detail::texture_antiderivative_l2(alpha1));
  } else {
    out.branch = DistBranch::Quadrature;
    out.value = dist_alpha_quadrature(alpha1, alpha2, static_cast<double>(L));
  }
  return out;
}

inline double dist_alpha(double alpha1, double alpha2, double looks) {
  return dist_alpha_info(alpha1, alpha2, looks).value;
}

// Scale distance s(g1, g2) = sqrt(-aL / (-a + L + 1)) |ln(g1/g2)|; depends
// on the texture alpha.
inline double dist_gamma(double gamma1, double gamma2, double alpha,
                         double looks) {
  if (!(gamma1 > 0.0) || !(gamma2 > 0.0))
    throw std::domain_error("dist_gamma: scales must be > 0");
  if (!(alpha < 0.0)) throw std::domain_error("dist_gamma: alpha must be < 0");
  if (!(looks >= 1.0)) throw std::domain_error("dist_gamma: looks must be >= 1");
  const double factor = std::sqrt(-alpha * looks / (-alpha + looks + 1.0));
  return std::fabs(factor * std::log(gamma1 / gamma2));
}

}  // namespace g0gd

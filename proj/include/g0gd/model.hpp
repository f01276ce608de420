#pragma once

// The G0 intensity model: density, log-density, moments, the unit-mean
// reparametrization, and exact sampling via a ratio of Gamma variates.
//
// A G0(alpha, gamma, L) return is the product of unit-mean Gamma(L, L)
// speckle and reciprocal-Gamma(-alpha, gamma) backscatter; texture
// alpha < 0, scale gamma > 0, looks L >= 1.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "g0gd/rng.hpp"
#include "g0gd/special.hpp"

namespace g0gd {

struct G0Params {
  double alpha = -2.0;  // texture, < 0
  double gamma = 1.0;   // scale, > 0
  double looks = 1.0;   // number of looks L, >= 1

  bool valid() const { return alpha < 0.0 && gamma > 0.0 && looks >= 1.0; }

  void validate() const {
    if (!valid())
      throw std::domain_error(
          "G0Params: requires alpha < 0, gamma > 0, looks >= 1");
  }
};

struct Sample {
  std::vector<double> values;
  std::string label;

  std::size_t size() const { return values.size(); }
  std::span<const double> span() const { return {values.data(), values.size()}; }
};

// Log of the G0 intensity density at z > 0. Canonical interface for
// likelihood work; never underflows where the density is representable
// in log space.
inline double log_pdf(const G0Params& p, double z) {
  p.validate();
  if (!(z > 0.0)) throw std::domain_error("log_pdf: z must be > 0");
  const double L = p.looks;
  const double a = p.alpha;
  const double zl = (L == 1.0) ? 0.0 : (L - 1.0) * std::log(z);
  return L * std::log(L) + log_gamma(L - a) - a * std::log(p.gamma) -
         log_gamma(-a) - log_gamma(L) + zl - (L - a) * std::log(p.gamma + z * L);
}

// G0 intensity density. May underflow to 0.0 in deep tails.
inline double pdf(const G0Params& p, double z) { return std::exp(log_pdf(p, z)); }

// r-th moment E(Z^r) = (gamma/L)^r Gamma(-alpha-r)Gamma(L+r) /
// (Gamma(-alpha)Gamma(L)); finite only for r < -alpha.
inline double moment(const G0Params& p, double r) {
  p.validate();
  if (!(r > 0.0)) throw std::domain_error("moment: order r must be > 0");
  if (!(r < -p.alpha))
    throw std::domain_error("moment: diverges for r >= -alpha");
  return std::exp(r * (std::log(p.gamma) - std::log(p.looks)) +
                  log_gamma(-p.alpha - r) + log_gamma(p.looks + r) -
                  log_gamma(-p.alpha) - log_gamma(p.looks));
}

// Scale gamma* = -alpha - 1 making E(Z) = 1 at L = 1; needs alpha < -1.
inline double unit_mean_gamma(double alpha) {
  if (!(alpha < -1.0))
    throw std::domain_error(
        "unit_mean_gamma: no unit-mean scale exists for alpha >= -1 at L = 1");
  return -alpha - 1.0;
}

// n i.i.d. G0 draws, deterministic given seed. Z = G1/G2 with
// G1 ~ Gamma(L, L) and G2 ~ Gamma(-alpha, gamma); the ratio reproduces
// the G0 moments exactly.
inline Sample sample(const G0Params& p, std::size_t n, std::uint64_t seed) {
  p.validate();
  if (n < 1) throw std::domain_error("sample: n must be >= 1");
  Rng rng(seed);
  Sample out;
  out.values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double z;
    do {
      const double speckle = gamma_variate(rng, p.looks, p.looks);
      const double inv_backscatter = gamma_variate(rng, -p.alpha, p.gamma);
      z = speckle / inv_backscatter;
    } while (!(z > 0.0) || !std::isfinite(z));
    out.values.push_back(z);
  }
  return out;
}

// Sample invariant check used by readers and fitters.
inline void validate_sample(std::span<const double> values,
                            std::size_t min_size = 1) {
  if (values.size() < min_size)
    throw std::domain_error("sample: need at least " + std::to_string(min_size) +
                            " observations");
  for (double v : values)
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::domain_error("sample: all values must be positive and finite");
}

}  // namespace g0gd

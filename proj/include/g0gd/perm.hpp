#pragma once

// Random-permutation calibration for statistics with unknown null
// distribution: shuffle the pooled sample, re-split into the original sizes,
// refit, recompute, and take the ">= observed" proportion as the p-value.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "g0gd/errors.hpp"
#include "g0gd/mle.hpp"
#include "g0gd/rng.hpp"
#include "g0gd/stats.hpp"
#include "g0gd/threading.hpp"

namespace g0gd {

enum class OnFitFailure { Skip, Retry, Abort };

inline const char* to_string(OnFitFailure o) {
  switch (o) {
    case OnFitFailure::Skip: return "skip";
    case OnFitFailure::Retry: return "retry";
    case OnFitFailure::Abort: return "abort";
  }
  return "?";
}

struct PermutationConfig {
  int perm = 1000;
  double eta = 0.05;
  std::uint64_t seed = 0;
  Statistic kind = Statistic::T1;
  OnFitFailure on_fit_failure = OnFitFailure::Skip;
  FeasibilityBox box{};
  MetricAlpha metric_alpha = MetricAlpha::PooledMean;
  std::optional<double> known_alpha;  // TGamma under permutation
  std::optional<double> known_gamma;  // TAlpha under permutation
  unsigned threads = 1;

  void validate() const {
    if (perm < 1) throw std::domain_error("PermutationConfig: perm must be >= 1");
    if (!(eta > 0.0 && eta < 1.0))
      throw std::domain_error("PermutationConfig: eta must lie in (0,1)");
    box.validate();
  }
};

struct PermutationResult {
  double observed = 0.0;
  std::vector<double> permuted;  // successful replicates, in replicate order
  double p_value = 1.0;
  bool rejected = false;
  int skipped = 0;
  int m = 0;
  int n = 0;
};

// Core driver over an arbitrary statistic of two samples. The statistic
// signals a failed replicate by throwing numerical_error; failures on the
// *observed* samples always propagate. Replicate k draws its RNG stream
// from (seed, k), so results do not depend on scheduling or thread count.
template <class StatFn>
PermutationResult permutation_test_with(std::span<const double> z1,
                                        std::span<const double> z2,
                                        const PermutationConfig& cfg,
                                        StatFn&& stat) {
  cfg.validate();
  validate_sample(z1, 3);
  validate_sample(z2, 3);
  const std::size_t m = z1.size(), n = z2.size();

  PermutationResult out;
  out.m = static_cast<int>(m);
  out.n = static_cast<int>(n);
  out.observed = stat(z1, z2);

  std::vector<double> pooled;
  pooled.reserve(m + n);
  pooled.insert(pooled.end(), z1.begin(), z1.end());
  pooled.insert(pooled.end(), z2.begin(), z2.end());

  const auto perm = static_cast<std::size_t>(cfg.perm);
  std::vector<double> slots(perm, 0.0);
  std::vector<char> ok(perm, 0);

  parallel_for(perm, cfg.threads, [&](std::size_t k) {
    Rng rng(derive_seed(cfg.seed, k));
    std::vector<double> local = pooled;
    const int attempts = cfg.on_fit_failure == OnFitFailure::Retry ? 2 : 1;
    for (int a = 0; a < attempts; ++a) {
      shuffle(local, rng);
      const std::span<const double> s1{local.data(), m};
      const std::span<const double> s2{local.data() + m, n};
      try {
        slots[k] = stat(s1, s2);
        ok[k] = 1;
        return;
      } catch (const numerical_error&) {
        if (cfg.on_fit_failure == OnFitFailure::Abort) throw;
      }
    }
  });

  out.permuted.reserve(perm);
  for (std::size_t k = 0; k < perm; ++k)
    if (ok[k]) out.permuted.push_back(slots[k]);
  out.skipped = static_cast<int>(perm - out.permuted.size());
  if (out.permuted.empty())
    throw numerical_error("permutation_test: every replicate failed to fit");

  std::size_t count = 0;
  for (double t : out.permuted)
    if (t >= out.observed) ++count;
  out.p_value = static_cast<double>(count) /
                static_cast<double>(out.permuted.size());
  out.rejected = out.p_value < cfg.eta;
  return out;
}

// The standard statistic of the configured kind, refitted on each split.
// T1/T2/T3 use regime-Both fits filtered by cfg.box; TAlpha / TGamma use
// the corresponding one-parameter regime with the known other parameter.
inline std::function<double(std::span<const double>, std::span<const double>)>
make_statistic_fn(Statistic kind, double looks, const PermutationConfig& cfg) {
  FitOptions fopt;
  fopt.box = cfg.box;
  switch (kind) {
    case Statistic::T1:
    case Statistic::T2:
    case Statistic::T3:
      return [kind, looks, fopt, metric = cfg.metric_alpha](
                 std::span<const double> a, std::span<const double> b) {
        const FitResult f1 = fit(a, looks, Regime::Both, std::nullopt, fopt);
        const FitResult f2 = fit(b, looks, Regime::Both, std::nullopt, fopt);
        return t_combined(kind, f1, f2, static_cast<int>(a.size()),
                          static_cast<int>(b.size()), looks, metric);
      };
    case Statistic::TAlpha: {
      if (!cfg.known_gamma)
        throw std::domain_error("permutation TAlpha needs known_gamma");
      const double kg = *cfg.known_gamma;
      return [kg, looks, fopt](std::span<const double> a,
                               std::span<const double> b) {
        const FitResult f1 = fit(a, looks, Regime::AlphaOnly, kg, fopt);
        const FitResult f2 = fit(b, looks, Regime::AlphaOnly, kg, fopt);
        return t_alpha(f1, f2, static_cast<int>(a.size()),
                       static_cast<int>(b.size()), looks);
      };
    }
    case Statistic::TGamma: {
      if (!cfg.known_alpha)
        throw std::domain_error("permutation TGamma needs known_alpha");
      const double ka = *cfg.known_alpha;
      return [ka, looks, fopt](std::span<const double> a,
                               std::span<const double> b) {
        const FitResult f1 = fit(a, looks, Regime::GammaOnly, ka, fopt);
        const FitResult f2 = fit(b, looks, Regime::GammaOnly, ka, fopt);
        return t_gamma(f1, f2, static_cast<int>(a.size()),
                       static_cast<int>(b.size()), ka, looks);
      };
    }
  }
  throw std::domain_error("make_statistic_fn: unknown statistic");
}

// Permutation test of H0 "same G0 law" for the statistic in cfg.kind.
inline PermutationResult permutation_test(std::span<const double> z1,
                                          std::span<const double> z2,
                                          double looks,
                                          const PermutationConfig& cfg) {
  return permutation_test_with(z1, z2, cfg, make_statistic_fn(cfg.kind, looks, cfg));
}

inline PermutationResult permutation_test(const Sample& z1, const Sample& z2,
                                          double looks,
                                          const PermutationConfig& cfg) {
  return permutation_test(z1.span(), z2.span(), looks, cfg);
}

}  // namespace g0gd

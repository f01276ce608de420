#include <doctest.h>

#include <cmath>
#include <vector>

#include "g0gd/mle.hpp"
#include "g0gd/model.hpp"
#include "g0gd/special.hpp"
#include "oracles.hpp"

using namespace g0gd;

namespace {

double sum_log_pdf(const G0Params& p, const Sample& z) {
  double s = 0.0;
  for (double v : z.values) s += log_pdf(p, v);
  return s;
}

}  // namespace

TEST_CASE("loglik_both reconciles with the full log-likelihood") {
  // sum log_pdf = l_both + n [L ln L - lnG(L)] + (L-1) sum ln z_i
  for (double looks : {1.0, 2.0, 3.0}) {
    const G0Params p{-2.7, 1.3, looks};
    const Sample z = sample(p, 500, 31);
    const auto n = static_cast<double>(z.size());
    double sum_ln_z = 0.0;
    for (double v : z.values) sum_ln_z += std::log(v);
    const double lhs = sum_log_pdf(p, z);
    const double rhs = loglik_both(p.alpha, p.gamma, looks, z.span()) +
                       n * (looks * std::log(looks) - log_gamma(looks)) +
                       (looks - 1.0) * sum_ln_z;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("loglik_alpha differs from loglik_both by a term constant in alpha") {
  const Sample z = sample({-1.8, 0.9, 2.0}, 300, 5);
  const double gamma = 0.9, looks = 2.0;
  const double d1 = loglik_both(-1.2, gamma, looks, z.span()) -
                    loglik_alpha(-1.2, gamma, looks, z.span());
  const double d2 = loglik_both(-6.4, gamma, looks, z.span()) -
                    loglik_alpha(-6.4, gamma, looks, z.span());
  CHECK(d1 == doctest::Approx(d2).epsilon(1e-12));
}

TEST_CASE("loglik_gamma differs from loglik_both by a term constant in gamma") {
  const Sample z = sample({-3.0, 2.0, 1.0}, 300, 6);
  const double alpha = -3.0, looks = 1.0;
  const double d1 = loglik_both(alpha, 0.7, looks, z.span()) -
                    loglik_gamma(0.7, alpha, looks, z.span());
  const double d2 = loglik_both(alpha, 4.2, looks, z.span()) -
                    loglik_gamma(4.2, alpha, looks, z.span());
  CHECK(d1 == doctest::Approx(d2).epsilon(1e-12));
}

TEST_CASE("loglik functions reject invalid parameters") {
  const Sample z = sample({-2.0, 1.0, 1.0}, 10, 1);
  CHECK_THROWS_AS(loglik_alpha(0.5, 1.0, 1.0, z.span()), std::domain_error);
  CHECK_THROWS_AS(loglik_alpha(-2.0, -1.0, 1.0, z.span()), std::domain_error);
  CHECK_THROWS_AS(loglik_gamma(-0.5, -2.0, 1.0, z.span()), std::domain_error);
  CHECK_THROWS_AS(loglik_both(-2.0, 1.0, 0.2, z.span()), std::domain_error);
}

TEST_CASE("loglik_alpha finite and smooth on a single observation") {
  const std::vector<double> z{1.0};
  double prev = loglik_alpha(-50.0, 1.0, 1.0, z);
  CHECK(std::isfinite(prev));
  for (double a = -49.0; a <= -0.02; a += 0.5) {
    const double cur = loglik_alpha(a, 1.0, 1.0, z);
    CHECK(std::isfinite(cur));
    prev = cur;
  }
}

TEST_CASE("one-parameter fits recover the truth on large samples") {
  const G0Params truth{-1.5, 1.0, 1.0};
  const Sample z = sample(truth, 100000, 314);
  FitOptions opt;
  opt.box = FeasibilityBox::around_truth(truth);

  const FitResult fa = fit(z, 1.0, Regime::AlphaOnly, truth.gamma, opt);
  REQUIRE(fa.converged);
  CHECK(std::fabs(fa.params_hat.alpha - truth.alpha) < 0.05);
  CHECK(fa.params_hat.gamma == truth.gamma);

  const FitResult fg = fit(z, 1.0, Regime::GammaOnly, truth.alpha, opt);
  REQUIRE(fg.converged);
  CHECK(std::fabs(fg.params_hat.gamma - truth.gamma) < 0.05);
  CHECK(fg.params_hat.alpha == truth.alpha);
}

TEST_CASE("gamma score vanishes at the GammaOnly optimum") {
  const G0Params truth{-1.5, 1.0, 1.0};
  const Sample z = sample(truth, 100000, 2718);
  FitOptions opt;
  opt.box = FeasibilityBox::around_truth(truth);
  const FitResult fg = fit(z, 1.0, Regime::GammaOnly, truth.alpha, opt);
  REQUIRE(fg.converged);
  const double g = fg.params_hat.gamma;
  const double h = 1e-5 * g;
  const double deriv = (loglik_gamma(g + h, truth.alpha, 1.0, z.span()) -
                        loglik_gamma(g - h, truth.alpha, 1.0, z.span())) /
                       (2.0 * h);
  CHECK(std::fabs(deriv) < 1e-6 * static_cast<double>(z.size()));
}

TEST_CASE("two-parameter fit recovers the truth on a 5000-point sample") {
  const G0Params truth{-3.0, 2.0, 1.0};
  const Sample z = sample(truth, 5000, 2025);
  FitOptions opt;
  opt.box = FeasibilityBox::around_truth(truth);
  const FitResult f = fit(z, 1.0, Regime::Both, std::nullopt, opt);
  REQUIRE(f.converged);
  REQUIRE(f.feasible);
  CHECK(std::fabs(f.params_hat.alpha - truth.alpha) < 0.15);
  CHECK(std::fabs(f.params_hat.gamma - truth.gamma) < 0.15);
}

TEST_CASE("score equations hold at an interior Both optimum") {
  // digamma system, in scaled units: |dl/dalpha| / n and |dl/dgamma| * gamma / n
  const G0Params truth{-2.0, 1.0, 1.0};
  const Sample z = sample(truth, 20000, 555);
  FitOptions opt;
  opt.box = FeasibilityBox::around_truth(truth);
  const FitResult f = fit(z, 1.0, Regime::Both, std::nullopt, opt);
  REQUIRE(f.feasible);
  const double a = f.params_hat.alpha, g = f.params_hat.gamma, L = 1.0;
  const auto n = static_cast<double>(z.size());
  double sum_ln = 0.0, sum_inv = 0.0;
  for (double v : z.values) {
    sum_ln += std::log((g + L * v) / g);
    sum_inv += 1.0 / (g + L * v);
  }
  const double score_alpha = n * (digamma(-a) - digamma(L - a)) + sum_ln;
  const double score_gamma = -n * a / g + (a - L) * sum_inv;
  CHECK(std::fabs(score_alpha) / n < 1e-4);
  CHECK(std::fabs(score_gamma) * g / n < 1e-4);
}

TEST_CASE("fit is deterministic") {
  const Sample z = sample({-2.5, 1.5, 1.0}, 200, 808);
  FitOptions opt;
  const FitResult a = fit(z, 1.0, Regime::Both, std::nullopt, opt);
  const FitResult b = fit(z, 1.0, Regime::Both, std::nullopt, opt);
  CHECK(a.params_hat.alpha == b.params_hat.alpha);
  CHECK(a.params_hat.gamma == b.params_hat.gamma);
  CHECK(a.loglik == b.loglik);
  CHECK(a.iterations == b.iterations);
  CHECK(a.converged == b.converged);
  CHECK(a.feasible == b.feasible);
}

TEST_CASE("degenerate and undersized samples are rejected") {
  const std::vector<double> constant(10, 3.0);
  CHECK_THROWS_AS(fit(constant, 1.0, Regime::Both, std::nullopt, FitOptions{}),
                  degenerate_sample_error);
  const std::vector<double> tiny{1.0, 2.0};
  CHECK_THROWS_AS(fit(tiny, 1.0, Regime::Both, std::nullopt, FitOptions{}),
                  std::domain_error);
  const std::vector<double> negative{1.0, -2.0, 3.0};
  CHECK_THROWS_AS(fit(negative, 1.0, Regime::Both, std::nullopt, FitOptions{}),
                  std::domain_error);
}

TEST_CASE("one-parameter regimes require their known parameter") {
  const Sample z = sample({-2.0, 1.0, 1.0}, 50, 3);
  CHECK_THROWS_AS(fit(z, 1.0, Regime::AlphaOnly, std::nullopt, FitOptions{}),
                  std::domain_error);
  CHECK_THROWS_AS(fit(z, 1.0, Regime::GammaOnly, std::nullopt, FitOptions{}),
                  std::domain_error);
  CHECK_THROWS_AS(fit(z, 1.0, Regime::AlphaOnly, -1.0, FitOptions{}),
                  std::domain_error);  // gamma must be > 0
}

TEST_CASE("tight feasibility box marks some small-sample fits infeasible") {
  const G0Params truth{-1.5, 0.5, 1.0};
  FitOptions opt;
  opt.box = FeasibilityBox::around_truth(truth);  // [15a, 0) x (0, 15g]
  int infeasible = 0, converged = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const Sample z = sample(truth, 50, 9000 + static_cast<std::uint64_t>(rep));
    try {
      const FitResult f = fit(z, 1.0, Regime::Both, std::nullopt, opt);
      if (f.converged) ++converged;
      if (f.converged && !f.feasible) ++infeasible;
    } catch (const numerical_error&) {
    }
  }
  CHECK(converged > 150);
  CHECK(infeasible > 0);  // the flat-likelihood pathology exists at n = 50
}

TEST_CASE("scale equivariance of the two-parameter fit") {
  const G0Params truth{-2.5, 1.0, 1.0};
  const Sample z = sample(truth, 2000, 77);
  FitOptions opt;
  opt.box = FeasibilityBox::wide(1.0);
  const FitResult base = fit(z, 1.0, Regime::Both, std::nullopt, opt);
  REQUIRE(base.converged);
  for (double c : {0.05, 3.0, 400.0}) {
    Sample scaled = z;
    for (auto& v : scaled.values) v *= c;
    FitOptions sopt;
    sopt.box = FeasibilityBox::wide(c);
    const FitResult f = fit(scaled, 1.0, Regime::Both, std::nullopt, sopt);
    REQUIRE(f.converged);
    CHECK(std::fabs(f.params_hat.alpha - base.params_hat.alpha) < 1e-6);
    CHECK(std::fabs(f.params_hat.gamma / c - base.params_hat.gamma) /
              base.params_hat.gamma <
          1e-6);
  }
}

TEST_CASE("median alpha error decreases with sample size (consistency sweep)") {
  const G0Params truth{-1.5, 1.0, 1.0};
  FitOptions opt;
  opt.box = FeasibilityBox::around_truth(truth);
  std::vector<double> sizes, medians;
  std::uint64_t seed = 0;
  for (int n = 50; n <= 950; n += 100) {
    std::vector<double> errors;
    for (int rep = 0; rep < 200; ++rep) {
      const Sample z =
          sample(truth, static_cast<std::size_t>(n), derive_seed(4242, seed++));
      const FitResult f = fit(z, 1.0, Regime::AlphaOnly, truth.gamma, opt);
      if (f.converged)
        errors.push_back(std::fabs(f.params_hat.alpha - truth.alpha));
    }
    sizes.push_back(n);
    medians.push_back(oracles::quantile(errors, 0.5));
  }
  CHECK(oracles::spearman(sizes, medians) < -0.9);
}

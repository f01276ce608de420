#include <doctest.h>

#include <cmath>

#include "g0gd/geodesic.hpp"
#include "g0gd/quadrature.hpp"
#include "g0gd/rng.hpp"
#include "oracles.hpp"

using namespace g0gd;

TEST_CASE("adaptive quadrature sanity") {
  CHECK(integrate_adaptive([](double x) { return x * x; }, 0.0, 1.0) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(integrate_adaptive([](double x) { return std::exp(-x * x); }, -10.0,
                           10.0) ==
        doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
  // a sharply peaked integrand forces subdivision
  CHECK(integrate_adaptive(
            [](double x) { return 1.0 / (1e-4 + (x - 0.3) * (x - 0.3)); }, 0.0,
            1.0, 1e-10) ==
        doctest::Approx((std::atan(0.7 / 1e-2) + std::atan(0.3 / 1e-2)) / 1e-2)
            .epsilon(1e-9));
}

TEST_CASE("texture distance, L=1 closed form") {
  CHECK(dist_alpha(-1.0, -std::exp(1.0), 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dist_alpha(-2.0, -2.0, 1.0) == doctest::Approx(0.0));
  CHECK(dist_alpha(-1.0, -2.0, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  // symmetry
  CHECK(dist_alpha(-3.0, -7.0, 1.0) == doctest::Approx(dist_alpha(-7.0, -3.0, 1.0)));
}

TEST_CASE("texture distance, frozen values") {
  // closed form L=2 against 30-digit references
  CHECK(dist_alpha(-2.0, -5.0, 2.0) ==
        doctest::Approx(1.1494744728314913777).epsilon(1e-12));
  CHECK(dist_alpha(-1.5, -10.0, 2.0) ==
        doctest::Approx(2.4109579309520491818).epsilon(1e-12));
  // quadrature branch references
  CHECK(dist_alpha(-2.0, -5.0, 3.0) ==
        doctest::Approx(1.2790783094392277039).epsilon(1e-9));
  CHECK(dist_alpha(-1.2, -17.0, 5.0) ==
        doctest::Approx(4.3949015982950194826).epsilon(1e-9));
}

TEST_CASE("closed forms agree with quadrature for L in {1,2}") {
  Rng rng(2024);
  for (int i = 0; i < 100; ++i) {
    const double a1 = -1.05 - 28.95 * rng.uniform01();
    const double a2 = -1.05 - 28.95 * rng.uniform01();
    for (double looks : {1.0, 2.0}) {
      const AlphaDistance info = dist_alpha_info(a1, a2, looks);
      const double quad = dist_alpha_quadrature(a1, a2, looks);
      CHECK(std::fabs(info.value - quad) < 1e-8);
      CHECK(info.branch ==
            (looks == 1.0 ? DistBranch::ClosedFormL1 : DistBranch::ClosedFormL2));
    }
  }
}

TEST_CASE("triangle equality along the alpha line") {
  // 1-D geodesic: for b between a and c the distance is additive
  const double a = -9.0, b = -4.0, c = -1.5;
  for (double looks : {1.0, 2.0, 4.0}) {
    CHECK(dist_alpha(a, c, looks) ==
          doctest::Approx(dist_alpha(a, b, looks) + dist_alpha(b, c, looks))
              .epsilon(1e-9));
    // and never exceeds via a detour point
    CHECK(dist_alpha(a, c, looks) <=
          dist_alpha(a, -20.0, looks) + dist_alpha(-20.0, c, looks) + 1e-12);
  }
}

TEST_CASE("texture distance nondecreasing in L") {
  const double a1 = -6.0, a2 = -2.0;
  double prev = 0.0;
  for (int looks = 1; looks <= 6; ++looks) {
    const double d = dist_alpha(a1, a2, static_cast<double>(looks));
    CHECK(d >= prev - 1e-12);
    prev = d;
  }
}

TEST_CASE("fractional looks are rounded with a warning flag") {
  const AlphaDistance rounded = dist_alpha_info(-2.0, -5.0, 1.4);
  CHECK(rounded.rounded_looks);
  CHECK(rounded.value == doctest::Approx(dist_alpha(-2.0, -5.0, 1.0)));
  const AlphaDistance exact = dist_alpha_info(-2.0, -5.0, 2.0);
  CHECK_FALSE(exact.rounded_looks);
}

TEST_CASE("texture distance domain errors") {
  CHECK_THROWS_AS(dist_alpha(1.0, -2.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(dist_alpha(-2.0, 0.0, 1.0), std::domain_error);
  // the ill-conditioned band near zero is rejected
  CHECK_THROWS_AS(dist_alpha(-1e-4, -2.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(dist_alpha(-2.0, -1e-5, 1.0), std::domain_error);
  CHECK_THROWS_AS(dist_alpha(-2.0, -3.0, 0.5), std::domain_error);
}

TEST_CASE("scale distance: frozen value and invariances") {
  // sqrt(2/4) ln 2
  CHECK(dist_gamma(2.0, 1.0, -2.0, 1.0) ==
        doctest::Approx(0.49012907173427359586).epsilon(1e-12));
  CHECK(dist_gamma(5.0, 5.0, -3.0, 2.0) == doctest::Approx(0.0));
  // symmetric in the scales
  CHECK(dist_gamma(2.0, 7.0, -3.0, 1.0) ==
        doctest::Approx(dist_gamma(7.0, 2.0, -3.0, 1.0)));
  // scale invariance under common multiplication
  Rng rng(77);
  for (int i = 0; i < 30; ++i) {
    const double g1 = 0.1 + 10.0 * rng.uniform01();
    const double g2 = 0.1 + 10.0 * rng.uniform01();
    const double c = 0.01 + 100.0 * rng.uniform01();
    CHECK(dist_gamma(c * g1, c * g2, -2.5, 2.0) ==
          doctest::Approx(dist_gamma(g1, g2, -2.5, 2.0)).epsilon(1e-12));
  }
  // strictly increasing in |ln(g1/g2)|
  CHECK(dist_gamma(3.0, 1.0, -2.0, 1.0) > dist_gamma(2.0, 1.0, -2.0, 1.0));
}

TEST_CASE("scale distance domain errors") {
  CHECK_THROWS_AS(dist_gamma(0.0, 1.0, -2.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(dist_gamma(1.0, -1.0, -2.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(dist_gamma(1.0, 1.0, 2.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(dist_gamma(1.0, 1.0, -2.0, 0.0), std::domain_error);
}

TEST_CASE("GeodesicSpec invariants") {
  const GeodesicSpec ok{2.0, -1.5};
  CHECK_NOTHROW(ok.validate());
  const GeodesicSpec no_alpha{1.0, std::nullopt};
  CHECK_NOTHROW(no_alpha.validate());
  const GeodesicSpec bad_looks{0.5, std::nullopt};
  CHECK_THROWS_AS(bad_looks.validate(), std::domain_error);
  const GeodesicSpec bad_alpha{1.0, 0.5};
  CHECK_THROWS_AS(bad_alpha.validate(), std::domain_error);
}

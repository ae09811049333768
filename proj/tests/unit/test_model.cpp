#include <cmath>

#include <doctest.h>

#include "addyn/errors.hpp"
#include "addyn/model.hpp"

using namespace addyn;

TEST_CASE("trait space membership") {
  const TraitSpace s(-2.0, 2.0);
  CHECK(s.contains(-2.0));
  CHECK(s.contains(2.0));
  CHECK_FALSE(s.contains(2.0000001));
  CHECK(s.interior(0.0));
  CHECK_FALSE(s.interior(-2.0));
  CHECK(s.diameter() == 4.0);
  CHECK_THROWS_AS(TraitSpace(1.0, 1.0), DomainError);
  CHECK_THROWS_AS(TraitSpace(1.0, -1.0), DomainError);
}

TEST_CASE("gaussian example rates") {
  GaussianExampleParams gp;
  gp.sigma_b = 0.9;
  gp.sigma_alpha = 0.7;
  const auto m = make_gaussian_example(gp);
  CHECK(m.space.lower == -2.0);
  CHECK(m.space.upper == 2.0);
  for (double x : {-1.7, -0.3, 0.0, 1.2}) {
    CHECK(m.death(x) == 0.0);
    CHECK(m.birth(x) == doctest::Approx(std::exp(-x * x / (2 * 0.81))).epsilon(1e-15));
    for (double y : {-1.0, 0.4}) {
      CHECK(m.competition(x, y) ==
            doctest::Approx(std::exp(-(x - y) * (x - y) / (2 * 0.49))).epsilon(1e-15));
    }
    CHECK(m.mut_prob(x) == 0.1);
  }
  CHECK(audit_assumptions(m).empty());
}

TEST_CASE("conditioned gaussian kernel") {
  const TraitSpace s(-2.0, 2.0);
  const auto k = conditioned_gaussian_kernel(s, 0.5);
  Rng rng = make_stream(3);

  SUBCASE("samples stay in the space and reach both sides") {
    for (double x : {-1.99, -1.0, 0.0, 1.95}) {
      int pos = 0, neg = 0;
      for (int i = 0; i < 2000; ++i) {
        const double h = k.sample(x, rng);
        REQUIRE(s.contains(x + h));
        pos += h > 0 ? 1 : 0;
        neg += h < 0 ? 1 : 0;
      }
      CHECK(pos > 0);
      CHECK(neg > 0);
    }
  }

  SUBCASE("density integrates to one and is dominated") {
    for (double x : {-1.9, 0.0, 1.3}) {
      const auto [lo, hi] = k.support(x);
      // Trapezoid rule on a fine grid as an independent check.
      const int n = 20000;
      double sum = 0.0;
      for (int i = 0; i <= n; ++i) {
        const double h = lo + (hi - lo) * i / n;
        const double w = (i == 0 || i == n) ? 0.5 : 1.0;
        sum += w * k.density(x, h);
        CHECK(k.density(x, h) <= k.dominating_density(h) * (1 + 1e-12));
      }
      CHECK(sum * (hi - lo) / n == doctest::Approx(1.0).epsilon(1e-6));
    }
  }

  SUBCASE("density near the boundary is the renormalised normal") {
    const double x = 1.9;
    const double mass = 0.5 * (std::erf((2.0 - x) / (0.5 * std::sqrt(2.0))) -
                               std::erf((-2.0 - x) / (0.5 * std::sqrt(2.0))));
    const double h = 0.05;
    const double phi = std::exp(-h * h / (2 * 0.25)) / (0.5 * std::sqrt(2 * M_PI));
    CHECK(k.density(x, h) == doctest::Approx(phi / mass).epsilon(1e-12));
    CHECK(k.density(x, 0.2) == 0.0);
  }
}

TEST_CASE("audit flags broken assumptions") {
  auto m = make_gaussian_example({});
  m.death = [](Trait) { return 2.0; };
  const auto warnings = audit_assumptions(m);
  CHECK_FALSE(warnings.empty());
}

#include <cmath>
#include <sstream>

#include <doctest.h>

#include "addyn/errors.hpp"
#include "addyn/fitness.hpp"
#include "addyn/tss.hpp"

using namespace addyn;

namespace {

ModelSpec example(double sigma_alpha, double sigma) {
  GaussianExampleParams gp;
  gp.sigma_alpha = sigma_alpha;
  gp.sigma = sigma;
  return make_gaussian_example(gp);
}

}  // namespace

TEST_CASE("g function") {
  const auto m = example(1.0, 0.3);
  for (double x : {-1.5, -0.4, 0.0, 0.9}) {
    CHECK(g_function(m, x, x) == 0.0);
    for (double y : {-1.9, -0.7, 0.2, 1.4}) {
      const double f = fitness1(m, y, x);
      const double g = g_function(m, y, x);
      CHECK((f > 0) == (g > 0));
      CHECK(g == doctest::Approx(m.mut_prob(x) * m.birth(x) * monomorphic_equilibrium(m, x) *
                                 f / m.birth(y))
                     .epsilon(1e-14));
    }
    const double expect = m.mut_prob(x) * monomorphic_equilibrium(m, x) * m.analytic->d1(x);
    CHECK(std::abs(g_gradient(m, x) - expect) < 1e-8);
  }
  CHECK(compute_gamma(m) > 0.0);
}

TEST_CASE("tss paths") {
  SUBCASE("no mutation means no motion") {
    auto m = example(1.0, 0.3);
    m.mut_prob = [](Trait) { return 0.0; };
    Rng rng = make_stream(1);
    const auto p = simulate_tss(m, -1.0, 0.1, 100.0, rng);
    CHECK(p.times.size() == 1);
    CHECK(p.at(50.0) == -1.0);
  }
  SUBCASE("jumps are small and move uphill far from the ES") {
    const auto m = example(1.0, 0.3);
    const double eps = 0.05;
    Rng rng = make_stream(2);
    const auto p = simulate_tss(m, -1.5, eps, 300.0, rng);
    REQUIRE(p.traits.size() > 10);
    CHECK(p.proposals >= p.traits.size() - 1);
    for (std::size_t i = 1; i < p.traits.size(); ++i) {
      CHECK(std::abs(p.traits[i] - p.traits[i - 1]) <= eps * m.space.diameter());
      CHECK(p.times[i] > p.times[i - 1]);
      if (p.traits[i - 1] < -0.2) {
        CHECK(p.traits[i] > p.traits[i - 1]);
      }
    }
    CHECK(p.at(0.0) == -1.5);
    CHECK(p.at(p.times[1]) == p.traits[1]);
  }
  SUBCASE("bad arguments") {
    const auto m = example(1.0, 0.3);
    Rng rng = make_stream(3);
    CHECK_THROWS_AS(simulate_tss(m, 2.5, 0.1, 1.0, rng), DomainError);
    CHECK_THROWS_AS(simulate_tss(m, 0.0, 1.5, 1.0, rng), DomainError);
  }
  SUBCASE("a thinning bound that is too small is reported") {
    const auto m = example(1.0, 0.3);
    Rng rng = make_stream(4);
    TssParams tiny;
    tiny.gamma = 1e-4;
    CHECK_THROWS_AS(simulate_tss(m, -1.5, 0.5, 1e5, rng, tiny), AssumptionViolation);
  }
}

TEST_CASE("tss jump rate") {
  const auto m = example(1.0, 0.3);
  const double x = -1.0, eps = 0.05;
  const double rate = tss_jump_rate(m, x, eps);

  // Trapezoid oracle over the kernel support.
  const auto [lo, hi] = m.kernel.support(x);
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double h = lo + (hi - lo) * i / n;
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    sum += w * std::max(g_function(m, x + eps * h, x), 0.0) * m.kernel.density(x, h);
  }
  CHECK(rate == doctest::Approx(sum * (hi - lo) / n / (eps * eps)).epsilon(1e-6));

  // First-jump times: censored exponential estimate.
  Rng rng = make_stream(5);
  const double horizon = 5.0;
  int jumps = 0;
  double exposure = 0.0;
  const int reps = 4000;
  TssParams tp;
  tp.gamma = compute_gamma(m);
  for (int i = 0; i < reps; ++i) {
    const auto p = simulate_tss(m, x, eps, horizon, rng, tp);
    if (p.times.size() > 1) {
      ++jumps;
      exposure += p.times[1];
    } else {
      exposure += horizon;
    }
  }
  REQUIRE(jumps > 200);
  const double est = jumps / exposure;
  CHECK(std::abs(est - rate) < 4 * rate / std::sqrt(double(jumps)));
}

TEST_CASE("canonical drift") {
  const double sigma = 0.05;
  const auto m = example(1.0, sigma);
  for (double x : {-1.3, -0.6, 0.4}) {
    // Away from the boundary the kernel is an untruncated normal, so the
    // half-line integral is dg * sigma^2 / 2.
    CHECK(canonical_drift(m, x) ==
          doctest::Approx(g_gradient(m, x) * sigma * sigma / 2).epsilon(1e-6));
  }
  CHECK(std::abs(canonical_drift(m, 0.0)) < 1e-12);

  // One-sided kernel at the boundary still points inward.
  const auto wide = example(1.0, 0.5);
  CHECK(canonical_drift(wide, -1.99) > 0.0);
}

TEST_CASE("canonical equation") {
  const auto m = example(1.0, 0.3);
  const auto sol = solve_canonical(m, -1.0, 400.0, 1e-10, 400);
  REQUIRE(sol.times.size() == 401);
  for (std::size_t i = 1; i < sol.traits.size(); ++i) {
    CHECK(sol.traits[i] >= sol.traits[i - 1]);
    CHECK(sol.traits[i] < 0.0);
  }
  CHECK(sol.error_estimate < 1e-6);
  // The drift is bounded on the path, so the solution is Lipschitz in time.
  double bound = 0.0;
  for (double x = -1.0; x <= 0.0; x += 0.001) {
    bound = std::max(bound, std::abs(canonical_drift(m, x)));
  }
  for (std::size_t i = 1; i < sol.traits.size(); ++i) {
    CHECK(sol.traits[i] - sol.traits[i - 1] <= bound * (sol.times[i] - sol.times[i - 1]) * 1.001);
  }

  const auto still = solve_canonical(m, 0.0, 100.0, 1e-10, 10);
  for (double v : still.traits) {
    CHECK(std::abs(v) < 1e-12);
  }

  std::ostringstream out;
  write_path_csv(out, m, {0.0, 1.0}, [](double) { return -1.0; });
  CHECK(out.str().find("-1") != std::string::npos);
}

#include <cmath>
#include <sstream>

#include <doctest.h>

#include "addyn/errors.hpp"
#include "addyn/fitness.hpp"
#include "addyn/pes.hpp"

using namespace addyn;

namespace {

ModelSpec example(double sigma_alpha, double sigma, double eps, int K = 1000) {
  GaussianExampleParams gp;
  gp.sigma_alpha = sigma_alpha;
  gp.sigma = sigma;
  gp.epsilon = eps;
  gp.K = K;
  return make_gaussian_example(gp);
}

PESState support_only(std::vector<Trait> s) {
  PESState st;
  st.densities.assign(s.size(), 0.5);
  st.support = std::move(s);
  return st;
}

JumpTrajectory path(const std::vector<std::vector<Trait>>& supports) {
  JumpTrajectory tr;
  tr.initial = support_only(supports.front());
  for (std::size_t i = 1; i < supports.size(); ++i) {
    tr.jumps.push_back({double(i), support_only(supports[i]), {}});
  }
  tr.t_end = double(supports.size());
  return tr;
}

}  // namespace

TEST_CASE("jump rates and acceptance") {
  const auto m = example(0.7, 0.3, 0.1);
  const auto s = monomorphic_state(m, -0.6);
  REQUIRE(s.support.size() == 1);
  CHECK(s.densities[0] == doctest::Approx(monomorphic_equilibrium(m, -0.6)).epsilon(1e-15));
  CHECK(s.diameter() == 0.0);
  const auto r = pes_jump_rates(s, m);
  CHECK(r.per_parent[0] ==
        doctest::Approx(m.mut_prob(-0.6) * m.birth(-0.6) * s.densities[0]).epsilon(1e-15));
  CHECK(r.total == r.per_parent[0]);

  for (double y : {-1.2, -0.7, -0.5, 0.0, 0.4}) {
    const double a = acceptance_probability(m, s, y);
    const double f = fitness1(m, y, -0.6);
    CHECK(a == doctest::Approx(std::max(f, 0.0) / m.birth(y)).epsilon(1e-14));
    CHECK(a >= 0.0);
    CHECK(a <= 1.0);
  }
}

TEST_CASE("waiting times are exponential with the rescaled rate") {
  const double eps = 0.2;
  const auto m = example(1.0, 0.3, eps);
  const auto s = monomorphic_state(m, -1.0);
  const double total = pes_jump_rates(s, m).total;
  Rng rng = make_stream(3);
  const int n = 20000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    sum += pes_step(m, s, rng, PesVariant::full).waiting_time;
  }
  const double mean = eps * eps / total;
  CHECK(std::abs(sum / n - mean) < 4 * mean / std::sqrt(double(n)));

  PesParams raw;
  raw.rescale_time = false;
  double sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    sum2 += pes_step(m, s, rng, PesVariant::full, raw).waiting_time;
  }
  CHECK(std::abs(sum2 / n - 1 / total) < 4 / (total * std::sqrt(double(n))));
}

TEST_CASE("pes steps") {
  SUBCASE("far from the ES accepted mutants substitute") {
    const auto m = example(1.0, 0.1, 1.0);
    const auto s = monomorphic_state(m, -1.2);
    Rng rng = make_stream(7);
    int accepted = 0;
    for (int i = 0; i < 300; ++i) {
      const auto r = pes_step(m, s, rng, PesVariant::full);
      REQUIRE(r.annotation);
      const auto& a = *r.annotation;
      CHECK(a.parent == -1.2);
      if (!a.accepted) {
        CHECK(r.state.support == s.support);
        continue;
      }
      ++accepted;
      CHECK(fitness1(m, a.mutant, -1.2) > 0.0);
      if (fitness1(m, -1.2, a.mutant) < 0.0) {
        REQUIRE(r.state.support.size() == 1);
        CHECK(r.state.support[0] == a.mutant);
        CHECK(r.state.densities[0] ==
              doctest::Approx(monomorphic_equilibrium(m, a.mutant)).epsilon(1e-9));
      }
    }
    CHECK(accepted > 0);
  }
  SUBCASE("mutually invasible pair gives the dimorphic equilibrium") {
    const auto m = example(0.7, 0.3, 1.0);
    const auto s = monomorphic_state(m, -0.05);
    Rng rng = make_stream(8);
    bool seen = false;
    for (int i = 0; i < 500 && !seen; ++i) {
      const auto r = pes_step(m, s, rng, PesVariant::full);
      if (r.state.support.size() != 2) {
        continue;
      }
      seen = true;
      const auto eq = dimorphic_equilibrium(m, r.state.support[0], r.state.support[1]);
      CHECK(r.state.densities[0] == doctest::Approx(eq.n1).epsilon(1e-8));
      CHECK(r.state.densities[1] == doctest::Approx(eq.n2).epsilon(1e-8));
    }
    CHECK(seen);
  }
  SUBCASE("killed1 fires on a mutually invasible pair and absorbs") {
    const auto m = example(0.7, 0.3, 1.0);
    const auto s = monomorphic_state(m, -0.05);
    Rng rng = make_stream(8);
    bool killed = false;
    for (int i = 0; i < 500 && !killed; ++i) {
      const auto r = pes_step(m, s, rng, PesVariant::killed1);
      REQUIRE(r.annotation);
      const Trait y = r.annotation->mutant;
      const bool pair = fitness1(m, y, -0.05) > 0 && fitness1(m, -0.05, y) > 0;
      CHECK(pair == !r.state.alive());
      if (!r.state.alive()) {
        killed = true;
        CHECK(r.annotation->killed_reason == KillReason::coexist_pair);
        const auto again = pes_step(m, r.state, rng, PesVariant::killed1);
        CHECK(std::isinf(again.waiting_time));
        CHECK_FALSE(again.state.alive());
      }
    }
    CHECK(killed);
  }
}

TEST_CASE("pes does not depend on the carrying scale") {
  const auto small = example(0.7, 0.3, 0.1, 50);
  const auto large = example(0.7, 0.3, 0.1, 100000);
  Rng a = make_stream(12), b = make_stream(12);
  const auto ta = simulate_pes(small, monomorphic_state(small, -1.0), 200.0, a, PesVariant::full);
  const auto tb = simulate_pes(large, monomorphic_state(large, -1.0), 200.0, b, PesVariant::full);
  std::ostringstream oa, ob;
  write_pes_ndjson(oa, ta);
  write_pes_ndjson(ob, tb);
  CHECK_FALSE(ta.jumps.empty());
  CHECK(oa.str() == ob.str());
}

TEST_CASE("branching detector") {
  const double eta = 0.2;
  SUBCASE("dimorphism growing out of a monomorphic state") {
    const auto rep = detect_branching(
        path({{-0.5}, {-0.1}, {0.01}, {-0.02, 0.03}, {-0.05, 0.06}, {-0.2, 0.3}}), 0.0, eta);
    CHECK(rep.occurred);
    CHECK(*rep.t1 == 2.0);
    CHECK(*rep.t2 == 4.0);
    CHECK(*rep.theta_eta == 1.0);
    CHECK_FALSE(rep.confined_after_theta);
    CHECK(rep.max_support_diameter == doctest::Approx(0.5));
  }
  SUBCASE("monomorphic path never branches") {
    const auto rep = detect_branching(path({{-0.5}, {-0.2}, {-0.05}, {0.01}, {-0.01}}), 0.0, eta);
    CHECK_FALSE(rep.occurred);
    CHECK(rep.confined_after_theta);
    CHECK(*rep.theta_eta == 2.0);
  }
  SUBCASE("shrinking diameter resets") {
    const auto rep = detect_branching(
        path({{0.0}, {-0.03, 0.04}, {-0.01, 0.02}, {-0.02, 0.09}}), 0.0, eta);
    CHECK_FALSE(rep.occurred);
  }
  SUBCASE("three traits in between reset") {
    const auto rep = detect_branching(
        path({{0.0}, {-0.03, 0.04}, {-0.03, 0.0, 0.04}, {-0.06, 0.07}}), 0.0, eta);
    CHECK_FALSE(rep.occurred);
  }
  SUBCASE("dimorphism not wider than eta/2") {
    const auto rep = detect_branching(path({{0.0}, {-0.03, 0.04}, {-0.04, 0.05}}), 0.0, eta);
    CHECK_FALSE(rep.occurred);
    CHECK(rep.confined_after_theta);
  }
  SUBCASE("killed state stops the scan") {
    auto tr = path({{0.0}, {-0.03, 0.04}});
    PESState dead;
    dead.killed = KillReason::coexist_pair;
    tr.jumps.push_back({3.0, dead, {}});
    tr.jumps.push_back({4.0, support_only({-0.1, 0.1}), {}});
    CHECK_FALSE(detect_branching(tr, 0.0, eta).occurred);
  }
}

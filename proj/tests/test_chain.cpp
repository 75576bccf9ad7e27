#include <algorithm>
#include <cmath>
#include <numbers>

#include "billiard/chain.hpp"
#include "billiard/parallel.hpp"
#include "doctest.h"

using namespace billiard;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("chain step endpoint draws on the circle") {
  Table t = Table::build(TableSpec::circle(1.0));
  Kernel k = Kernel::example1(0.1);
  // The deterministic image of (0, pi/2) is (pi, pi/2); a midpoint draw
  // keeps the angle, an endpoint draw shifts it by epsilon.
  PhasePoint x{0.0, kPi / 2.0};
  StepResult det = map_step(t, x);
  CHECK(k.sample(det.next.theta, 0.5) == doctest::Approx(kPi / 2.0));
  CHECK(k.sample(det.next.theta, 1.0) == doctest::Approx(kPi / 2.0 + 0.1));
  CHECK(det.next.s == doctest::Approx(kPi));
}

TEST_CASE("zero steps returns the initial point") {
  Table t = Table::build(TableSpec::circle(1.0));
  Kernel k = Kernel::example1(0.1);
  ChainConfig cfg;
  cfg.table = &t;
  cfg.kernel = &k;
  cfg.n_steps = 0;
  cfg.record_states = true;
  cfg.init = InitialCondition::at({1.0, 0.5});
  ChainRun run = run_chain(cfg);
  REQUIRE(run.states.size() == 1);
  CHECK(run.states[0].s == doctest::Approx(1.0));
  CHECK(run.final.theta == doctest::Approx(0.5));
}

TEST_CASE("vanishing noise recovers the deterministic circle orbit") {
  Table t = Table::build(TableSpec::circle(1.0));
  Kernel k = Kernel::example1(1e-9);
  ChainConfig cfg;
  cfg.table = &t;
  cfg.kernel = &k;
  cfg.n_steps = 100;
  cfg.init = InitialCondition::at({0.0, kPi / 3.0});
  ChainRun run = run_chain(cfg);
  const double expect = std::fmod(100 * 2.0 * kPi / 3.0, 2.0 * kPi);
  CHECK(std::abs(run.final.s - expect) < 1e-5);
}

TEST_CASE("ensembles are deterministic regardless of worker count") {
  Table t = Table::build(TableSpec::ellipse(2.0, 1.0));
  Kernel k = Kernel::example2(0.2);
  ChainConfig cfg;
  cfg.table = &t;
  cfg.kernel = &k;
  cfg.seed = 77;
  cfg.n_steps = 50;
  cfg.n_chains = 64;
  cfg.init = InitialCondition::nu();

  set_worker_count(1);
  auto one = run_ensemble(cfg);
  set_worker_count(4);
  auto four = run_ensemble(cfg);
  set_worker_count(0);  // back to automatic
  REQUIRE(one.size() == four.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].s == four[i].s);  // bit identical
    CHECK(one[i].theta == four[i].theta);
  }

  // Re-running a single chain reproduces its slot in the ensemble.
  cfg.init = InitialCondition::nu();
  ChainRun solo = run_chain(cfg, 17);
  CHECK(solo.final.s == one[17].s);
  CHECK(solo.final.theta == one[17].theta);
}

TEST_CASE("one-step law is uniform on the kernel support") {
  // KS test of the theta-marginal after one step from a fixed point against
  // the exact uniform CDF on [theta1 - eps, theta1 + eps].
  Table t = Table::build(TableSpec::ellipse(2.0, 1.0));
  Kernel k = Kernel::example1(0.3);
  PhasePoint x{1.0, 1.1};
  const double theta1 = map_step(t, x).next.theta;
  Interval sup = k.support(theta1);

  const long N = 100000;
  std::vector<double> draws(N);
  for (long c = 0; c < N; ++c) {
    RngStream rng(4242, static_cast<std::uint64_t>(c));
    rng.set_step(1);
    draws[c] = chain_step(t, k, x, rng).theta;
  }
  std::sort(draws.begin(), draws.end());
  double ks = 0.0;
  for (long i = 0; i < N; ++i) {
    const double cdf = (draws[i] - sup.lo) / sup.length();
    ks = std::max(ks, std::abs(cdf - (i + 1.0) / N));
    ks = std::max(ks, std::abs(cdf - i / static_cast<double>(N)));
  }
  // 1% critical value 1.628/sqrt(N)
  CHECK(ks < 1.628 / std::sqrt(static_cast<double>(N)));
}

TEST_CASE("markov property surrogate") {
  // The law of step k+1 given the state at step k matches the one-step law
  // started fresh from that state (KS over the theta marginal).
  Table t = Table::build(TableSpec::ellipse(2.0, 1.0));
  Kernel k = Kernel::example1(0.3);
  for (PhasePoint probe : {PhasePoint{0.5, 0.8}, PhasePoint{3.0, 1.9},
                           PhasePoint{7.0, 2.6}}) {
    const double theta1 = map_step(t, probe).next.theta;
    Interval sup = k.support(theta1);
    const long N = 20000;
    std::vector<double> direct(N), nested(N);
    for (long c = 0; c < N; ++c) {
      RngStream r1(9001, static_cast<std::uint64_t>(c));
      r1.set_step(1);
      direct[c] = chain_step(t, k, probe, r1).theta;
      // Arrive at the probe state artificially, then take one more step with
      // a different stream position.
      RngStream r2(9002, static_cast<std::uint64_t>(c));
      r2.set_step(5);
      nested[c] = chain_step(t, k, probe, r2).theta;
    }
    std::sort(direct.begin(), direct.end());
    std::sort(nested.begin(), nested.end());
    double ks = 0.0;
    for (long i = 0; i < N; ++i) {
      const double ca = (direct[i] - sup.lo) / sup.length();
      const double cb = (nested[i] - sup.lo) / sup.length();
      ks = std::max({ks, std::abs(ca - (i + 1.0) / N), std::abs(cb - (i + 1.0) / N)});
    }
    CHECK(ks < 1.628 / std::sqrt(static_cast<double>(N)));
  }
}

TEST_CASE("states stay on the cylinder") {
  Table t = Table::build(TableSpec::ellipse(2.0, 1.0));
  Kernel k = Kernel::example2(0.4);
  ChainConfig cfg;
  cfg.table = &t;
  cfg.kernel = &k;
  cfg.seed = 5;
  cfg.n_steps = 2000;
  cfg.record_states = true;
  cfg.init = InitialCondition::at({0.0, 0.01});
  ChainRun run = run_chain(cfg);
  for (const auto& p : run.states) {
    CHECK(p.s >= 0.0);
    CHECK(p.s < t.length());
    CHECK(p.theta >= 0.0);
    CHECK(p.theta <= kPi);
  }
  CHECK(run.chord_lengths.size() == 2000);
}

TEST_CASE("budget and config validation") {
  Table t = Table::build(TableSpec::circle(1.0));
  Kernel k = Kernel::example1(0.1);
  ChainConfig cfg;
  cfg.table = &t;
  cfg.kernel = &k;
  cfg.n_steps = 1 << 20;
  cfg.n_chains = 1 << 20;
  CHECK_THROWS_AS(cfg.validate(), BudgetExceeded);

  cfg.n_chains = 0;
  CHECK_THROWS_AS(cfg.validate(), BadSpec);
}

TEST_CASE("initial condition parsing") {
  InitialCondition ic = InitialCondition::parse("1.5,0.7");
  CHECK(ic.law == InitialCondition::Law::point);
  CHECK(ic.point.s == doctest::Approx(1.5));
  CHECK(ic.point.theta == doctest::Approx(0.7));
  CHECK(InitialCondition::parse("uniform").law == InitialCondition::Law::uniform);
  CHECK(InitialCondition::parse("nu").law == InitialCondition::Law::nu);
  CHECK_THROWS_AS(InitialCondition::parse("bogus"), BadSpec);
}

TEST_CASE("checkpoint runner matches the plain runner") {
  Table t = Table::build(TableSpec::ellipse(2.0, 1.0));
  Kernel k = Kernel::example1(0.3);
  ChainConfig cfg;
  cfg.table = &t;
  cfg.kernel = &k;
  cfg.seed = 123;
  cfg.n_steps = 30;
  cfg.n_chains = 16;
  cfg.init = InitialCondition::at({0.0, 1.0});
  auto finals = run_ensemble(cfg);
  auto checkpointed = run_ensemble_checkpoints(cfg, {10, 30});
  REQUIRE(checkpointed.size() == 2);
  for (int c = 0; c < 16; ++c) {
    CHECK(checkpointed[1][c].s == finals[c].s);
    CHECK(checkpointed[1][c].theta == finals[c].theta);
  }
}

#include <cmath>
#include <numbers>
#include <vector>

#include "billiard/diagnostics.hpp"
#include "doctest.h"

using namespace billiard;

namespace {
constexpr double kPi = std::numbers::pi;

GridMeasure random_measure(int ns, int nt, double length, std::uint64_t& state) {
  GridMeasure g(ns, nt, length);
  for (int i = 0; i < 500; ++i) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    g.add_cell(static_cast<int>((state >> 33) % (ns * nt)));
  }
  g.normalize();
  return g;
}
}  // namespace

TEST_CASE("histogram basics") {
  GridMeasure g(4, 4, 2.0 * kPi);
  g.add({1.0, 1.0});
  g.normalize();
  CHECK(g.sample_count() == 1);
  double total = 0.0;
  int nonzero = 0;
  for (double m : g.masses()) {
    total += m;
    if (m > 0) ++nonzero;
  }
  CHECK(total == doctest::Approx(1.0));
  CHECK(nonzero == 1);

  // theta = pi lands in the top row, not out of range.
  GridMeasure h(4, 4, 2.0 * kPi);
  h.add({0.0, kPi});
  CHECK(h.counts()[3] == 1);

  CHECK_THROWS_AS(GridMeasure(1, 4, 1.0), BadSpec);
  CHECK_THROWS_AS(GridMeasure::from_points({}, 4, 4, 1.0), BadSpec);
}

TEST_CASE("uniform samples spread evenly") {
  GridMeasure g(8, 8, 1.0);
  std::uint64_t state = 3;
  const long N = 640000;
  for (long i = 0; i < N; ++i) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    const double u = (state >> 11) * 0x1.0p-53;
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    const double v = (state >> 11) * 0x1.0p-53;
    g.add({u, v * kPi});
  }
  g.normalize();
  for (double m : g.masses()) {
    CHECK(m == doctest::Approx(1.0 / 64).epsilon(0.05));
  }
}

TEST_CASE("nu samples match analytic cell masses") {
  // nu has density sin(theta)/(2 L); its cell masses on an n x n grid are
  // (cos(a) - cos(b)) / (2 n_s).
  Table t = Table::build(TableSpec::circle(1.0));
  const int ns = 16, nt = 16;
  const long N = 1000000;
  GridMeasure g(ns, nt, t.length());
  RngStream rng(314, 0);
  rng.set_step(0);
  for (long i = 0; i < N; ++i) {
    g.add({t.length() * rng.uniform01(), std::acos(1.0 - 2.0 * rng.uniform01())});
  }
  g.normalize();
  for (int it = 0; it < nt; ++it) {
    const double a = kPi * it / nt, b = kPi * (it + 1) / nt;
    const double want = (std::cos(a) - std::cos(b)) / 2.0 / ns;
    const double sigma = std::sqrt(want * (1 - want) / N);
    for (int is = 0; is < ns; ++is) {
      CHECK(std::abs(g.mass(is, it) - want) < 4.0 * sigma + 1e-9);
    }
  }
}

TEST_CASE("tv distance is a metric") {
  CHECK_THROWS_AS(tv_distance(GridMeasure(4, 4, 1.0), GridMeasure(8, 8, 1.0)), BadSpec);

  GridMeasure a(4, 4, 1.0), b(4, 4, 1.0), u(4, 4, 1.0);
  a.add({0.1, 0.1});
  b.add({0.9, 3.0});
  a.normalize();
  b.normalize();
  CHECK(tv_distance(a, a) == 0.0);
  CHECK(tv_distance(a, b) == doctest::Approx(1.0));

  // Uniform on two cells vs uniform on one of them.
  u.add({0.1, 0.1});
  u.add({0.9, 3.0});
  u.normalize();
  CHECK(tv_distance(u, a) == doctest::Approx(0.5));

  // Symmetry and triangle inequality on random triples.
  std::uint64_t state = 17;
  for (int trial = 0; trial < 20; ++trial) {
    GridMeasure x = random_measure(4, 4, 1.0, state);
    GridMeasure y = random_measure(4, 4, 1.0, state);
    GridMeasure z = random_measure(4, 4, 1.0, state);
    CHECK(tv_distance(x, y) == doctest::Approx(tv_distance(y, x)));
    CHECK(tv_distance(x, z) <= tv_distance(x, y) + tv_distance(y, z) + 1e-12);
  }
}

TEST_CASE("coarsening never increases tv") {
  std::uint64_t state = 23;
  for (int trial = 0; trial < 20; ++trial) {
    GridMeasure x = random_measure(8, 8, 1.0, state);
    GridMeasure y = random_measure(8, 8, 1.0, state);
    CHECK(tv_distance(x.coarsened(), y.coarsened()) <= tv_distance(x, y) + 1e-12);
  }
}

TEST_CASE("tv decay on a mixing chain") {
  Table t = Table::build(TableSpec::ellipse(2.0, 1.0));
  Kernel k = Kernel::example1(0.3);
  std::vector<std::int64_t> steps = {0, 1, 2, 3, 5, 6, 7, 8, 10, 12, 15, 20, 30};
  DecayFit fit = tv_decay_experiment(t, k, {0.0, 0.05}, {0.0, kPi / 2}, steps, 20000, 7);

  REQUIRE(fit.tv.size() == steps.size());
  CHECK(fit.tv[0] == doctest::Approx(1.0));  // distinct point masses
  for (double v : fit.tv) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0 + 1e-12);
  }
  CHECK(fit.gamma_hat > 0.0);
  CHECK(fit.r_squared > 0.8);

  // Swapping the starts leaves the estimates unchanged.
  DecayFit swapped =
      tv_decay_experiment(t, k, {0.0, kPi / 2}, {0.0, 0.05}, steps, 20000, 7);
  for (std::size_t i = 0; i < fit.tv.size(); ++i) {
    CHECK(swapped.tv[i] == doctest::Approx(fit.tv[i]).epsilon(1e-12));
  }
}

TEST_CASE("stationary estimate is s-uniform on the circle") {
  Table t = Table::build(TableSpec::circle(1.0));
  Kernel k = Kernel::example1(0.3);
  GridMeasure g = invariant_measure_estimate(t, k, 1000, 400000, 11, 16, 16);
  for (int is = 0; is < 16; ++is) {
    double col = 0.0;
    for (int it = 0; it < 16; ++it) col += g.mass(is, it);
    CHECK(col == doctest::Approx(1.0 / 16).epsilon(0.08));
  }

  // Two independent seeds agree.
  GridMeasure h = invariant_measure_estimate(t, k, 1000, 400000, 12, 16, 16);
  CHECK(tv_distance(g, h) < 0.05);
}

TEST_CASE("absorption statistics") {
  Table t = Table::build(TableSpec::ellipse(2.0, 1.0));
  ChainConfig cfg;
  cfg.table = &t;
  cfg.seed = 40;
  cfg.n_steps = 2000;
  cfg.record_states = true;
  cfg.init = InitialCondition::at({0.0, 0.2});

  Kernel k3 = Kernel::example3(0.3);
  cfg.kernel = &k3;
  std::vector<ChainRun> absorbed;
  for (int c = 0; c < 30; ++c) absorbed.push_back(run_chain(cfg, c));
  AbsorptionStats st3 = absorption_statistics(absorbed);
  CHECK(st3.fraction_below(1e-3) > 0.9);
  CHECK(st3.log_drift < 0.0);  // mean log distance decreases
  CHECK(st3.fraction_below(kPi) == 1.0);

  Kernel k1 = Kernel::example1(0.3);
  cfg.kernel = &k1;
  std::vector<ChainRun> mixing;
  for (int c = 0; c < 30; ++c) mixing.push_back(run_chain(cfg, c));
  AbsorptionStats st1 = absorption_statistics(mixing);
  CHECK(st1.median_min_theta > st3.median_min_theta);

  CHECK_THROWS_AS(absorption_statistics({}), BadSpec);
}

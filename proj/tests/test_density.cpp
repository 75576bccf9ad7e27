#include <cmath>
#include <numbers>

#include "billiard/chain.hpp"
#include "billiard/grid_measure.hpp"
#include "billiard/two_step_density.hpp"
#include "doctest.h"

using namespace billiard;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("density vanishes outside the two-step reach") {
  Table t = Table::build(TableSpec::ellipse(2.0, 1.0));
  Kernel k = Kernel::example1(0.1);
  PhasePoint x{0.0, kPi / 2.0};
  // After one bounce theta stays near pi/2; a target angle near the boundary
  // cannot be reached by a second draw of width 0.1.
  CHECK(two_step_density(t, k, x, {1.0, 0.01}) == 0.0);
  CHECK(two_step_density(t, k, x, {4.0, kPi - 0.01}) == 0.0);
}

TEST_CASE("density integrates to one") {
  Table t = Table::build(TableSpec::ellipse(2.0, 1.0));
  Kernel k = Kernel::example1(0.3);
  for (PhasePoint x : {PhasePoint{0.0, kPi / 2}, PhasePoint{2.0, 0.8},
                       PhasePoint{6.5, 2.2}}) {
    TwoStepDensity d(t, k, x);
    CHECK(d.total_integral() == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("cell integrals match monte carlo") {
  Table t = Table::build(TableSpec::ellipse(2.0, 1.0));
  Kernel k = Kernel::example1(0.3);
  PhasePoint x{1.0, 1.2};
  TwoStepDensity d(t, k, x);

  ChainConfig cfg;
  cfg.table = &t;
  cfg.kernel = &k;
  cfg.seed = 33;
  cfg.n_steps = 2;
  cfg.n_chains = 200000;
  cfg.init = InitialCondition::at(x);
  const int n = 16;
  GridMeasure g = GridMeasure::from_points(run_ensemble(cfg), n, n, t.length());

  const double N = cfg.n_chains;
  for (int is = 0; is < n; ++is) {
    for (int it = 0; it < n; ++it) {
      const double want = d.cell_integral(is * t.length() / n, (is + 1) * t.length() / n,
                                          it * kPi / n, (it + 1) * kPi / n);
      const double sigma = std::sqrt(std::max(want * (1.0 - want), 1e-12) / N);
      CHECK(std::abs(g.mass(is, it) - want) < 3.0 * sigma + 2e-4);
    }
  }
}

TEST_CASE("density is positive and continuous off the branch edges") {
  Table t = Table::build(TableSpec::ellipse(2.0, 1.0));
  Kernel k = Kernel::example1(0.3);
  PhasePoint x{1.0, 1.2};
  TwoStepDensity d(t, k, x);

  // Pick a target through the middle of the intermediate support.
  StepResult first = map_step(t, x);
  StepResult second = map_step(t, first.next);
  PhasePoint y{second.next.s, second.next.theta};
  const double base = d.eval(y);
  CHECK(base > 0.0);
  for (double ds : {-1e-4, 1e-4}) {
    for (double dth : {-1e-4, 1e-4}) {
      const double v = d.eval({y.s + ds, y.theta + dth});
      CHECK(v > 0.0);
      CHECK(v == doctest::Approx(base).epsilon(0.05));
    }
  }
}

TEST_CASE("circle density agrees with the closed form") {
  // On the unit circle s1(theta') = s1 + 2 theta' and theta passes through,
  // so p2(x, y) = q(theta1 | .)(theta_x1 -> theta') / 2 * q(theta' -> theta_y)
  // with theta' = (s_y - s1)/2 mod pi.
  Table t = Table::build(TableSpec::circle(1.0));
  Kernel k = Kernel::example1(0.2);
  PhasePoint x{0.5, 1.3};
  StepResult first = map_step(t, x);
  TwoStepDensity d(t, k, x);

  for (double target_theta : {1.15, 1.3, 1.45}) {
    // Send the intermediate angle theta' to a chosen value and compute where
    // the second bounce lands.
    const double theta_p = target_theta;
    const double s_y = first.next.s + 2.0 * theta_p;
    const double want = k.density(first.next.theta, theta_p) / 2.0 *
                        k.density(theta_p, theta_p);
    const double got = d.eval({s_y, theta_p});
    CHECK(got == doctest::Approx(want).epsilon(1e-6));
  }
}

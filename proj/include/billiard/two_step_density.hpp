#pragma once

#include "billiard/kernel.hpp"
#include "billiard/map.hpp"

namespace billiard {

/// Two-step transition density p^2(x, y) of the perturbed chain: one bounce,
/// an angle draw, a second bounce, a second draw. For fixed x the arrival
/// arc s1'(theta') is strictly increasing (twist), so evaluation reduces to
/// root finding on a precomputed monotone lift of the intermediate branch.
class TwoStepDensity {
 public:
  TwoStepDensity(const Table& table, const Kernel& kernel, PhasePoint x,
                 int branch_nodes = 1024);

  double eval(PhasePoint y) const;

  /// Integral of eval over a phase rectangle, computed in the intermediate
  /// angle variable where the integrand is piecewise smooth.
  double cell_integral(double s_lo, double s_hi, double theta_lo,
                       double theta_hi) const;

  /// Integral over the whole cylinder; 1 up to quadrature error whenever the
  /// intermediate support is interior.
  double total_integral(int panels = 128) const;

  double lift_min() const { return lift_.front(); }
  double lift_max() const { return lift_.back(); }

 private:
  struct Branch {
    double theta_prime;
    double lift;  // monotone arrival arc
  };
  struct Root {
    double theta_prime;
    double theta1_prime;  // arrival angle
    double weight;        // dens(theta1 -> theta') / twist
  };

  double lift_at(double theta_prime, double hint) const;
  double inv_lift(double target) const;
  std::vector<Root> roots_at(double s_y) const;

  const Table& table_;
  const Kernel& kernel_;
  double s1_;      // arc after the first bounce
  double theta1_;  // deterministic angle after the first bounce
  std::vector<double> theta_;  // branch grid over the intermediate support
  std::vector<double> lift_;
};

/// Convenience wrapper; prefer the class when evaluating many y for one x.
double two_step_density(const Table& table, const Kernel& kernel, PhasePoint x,
                        PhasePoint y);

}  // namespace billiard

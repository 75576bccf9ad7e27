#pragma once

#include <string>
#include <vector>

#include "billiard/errors.hpp"
#include "billiard/rng.hpp"

namespace billiard {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  bool contains(double v) const { return v >= lo && v <= hi; }
};

/// Piecewise-linear interval map theta -> [lo(theta), hi(theta)] on [0, pi]
/// for user-supplied perturbation laws.
struct IntervalTable {
  std::vector<double> theta;  // strictly increasing, spanning [0, pi]
  std::vector<double> lo;
  std::vector<double> hi;
  Interval eval(double th) const;
};

/// Perturbation law of the outgoing angle: given the deterministic
/// post-collision angle theta, the perturbed angle is uniform on
/// support(theta). Immutable; sampling takes a caller-owned stream.
class Kernel {
 public:
  enum class Family { example1, example2, example3, custom_uniform };

  static Kernel example1(double epsilon);
  static Kernel example2(double epsilon);
  static Kernel example3(double epsilon);
  static Kernel custom(IntervalTable table, double epsilon);
  static Kernel parse(const std::string& family, double epsilon);
  static Kernel custom_from_json_text(const std::string& json_text, double epsilon);

  Family family() const { return family_; }
  double epsilon() const { return epsilon_; }

  Interval support(double theta) const;

  /// Conditional density q(theta' | theta); 1/|support| inside, 0 outside.
  double density(double theta, double theta_prime) const;

  /// Inverse-CDF draw from an explicit unit uniform.
  double sample(double theta, double u01) const;
  double sample(double theta, RngStream& rng) const;

 private:
  Kernel(Family f, double eps) : family_(f), epsilon_(eps) {}
  Family family_;
  double epsilon_;
  IntervalTable table_;
};

}  // namespace billiard

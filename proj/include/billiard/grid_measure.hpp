#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "billiard/errors.hpp"
#include "billiard/map.hpp"

namespace billiard {

/// Normalized histogram over a rectangular (s, theta) grid on
/// [0, length) x [0, pi]. theta = pi lands in the top row.
class GridMeasure {
 public:
  GridMeasure(int n_s, int n_theta, double length);

  static GridMeasure from_points(std::span<const PhasePoint> points, int n_s,
                                 int n_theta, double length);

  int n_s() const { return n_s_; }
  int n_theta() const { return n_theta_; }
  double length() const { return length_; }
  std::int64_t sample_count() const { return samples_; }

  int cell_of(PhasePoint x) const;
  void add(PhasePoint x) { add_cell(cell_of(x)); }
  void add_cell(int cell);

  double mass(int i_s, int i_theta) const { return mass_[i_s * n_theta_ + i_theta]; }
  const std::vector<double>& masses() const { return mass_; }
  const std::vector<std::int64_t>& counts() const { return counts_; }
  double cell_area() const;

  /// Recomputes normalized masses from counts; no-op when empty.
  void normalize();

  /// Halved resolution in both directions (dims must be even).
  GridMeasure coarsened() const;

 private:
  int n_s_;
  int n_theta_;
  double length_;
  std::int64_t samples_ = 0;
  std::vector<std::int64_t> counts_;
  std::vector<double> mass_;
};

/// Half the L1 distance of cell masses; the discretized total variation.
double tv_distance(const GridMeasure& a, const GridMeasure& b);

}  // namespace billiard

#include "billiard/grid_measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace billiard {

namespace {
constexpr double kPi = std::numbers::pi;
}

GridMeasure::GridMeasure(int n_s, int n_theta, double length)
    : n_s_(n_s), n_theta_(n_theta), length_(length) {
  if (n_s < 2 || n_theta < 2) throw BadSpec("grid dims must be >= 2");
  counts_.assign(std::size_t(n_s) * n_theta, 0);
  mass_.assign(std::size_t(n_s) * n_theta, 0.0);
}

GridMeasure GridMeasure::from_points(std::span<const PhasePoint> points, int n_s,
                                     int n_theta, double length) {
  if (points.empty()) throw BadSpec("empty point set for empirical measure");
  GridMeasure g(n_s, n_theta, length);
  for (const PhasePoint& p : points) g.add(p);
  g.normalize();
  return g;
}

int GridMeasure::cell_of(PhasePoint x) const {
  double s = std::fmod(x.s, length_);
  if (s < 0.0) s += length_;
  int is = static_cast<int>(s / length_ * n_s_);
  if (is >= n_s_) is = n_s_ - 1;
  int it = static_cast<int>(x.theta / kPi * n_theta_);
  if (it >= n_theta_) it = n_theta_ - 1;
  if (it < 0) it = 0;
  return is * n_theta_ + it;
}

void GridMeasure::add_cell(int cell) {
  ++counts_[cell];
  ++samples_;
}

double GridMeasure::cell_area() const { return (length_ / n_s_) * (kPi / n_theta_); }

void GridMeasure::normalize() {
  if (samples_ == 0) return;
  const double inv = 1.0 / static_cast<double>(samples_);
  for (std::size_t i = 0; i < counts_.size(); ++i) mass_[i] = counts_[i] * inv;
}

GridMeasure GridMeasure::coarsened() const {
  if (n_s_ % 2 != 0 || n_theta_ % 2 != 0) {
    throw BadSpec("coarsening needs even grid dims");
  }
  GridMeasure g(n_s_ / 2, n_theta_ / 2, length_);
  for (int i = 0; i < n_s_; ++i) {
    for (int j = 0; j < n_theta_; ++j) {
      g.counts_[(i / 2) * g.n_theta_ + j / 2] += counts_[i * n_theta_ + j];
    }
  }
  g.samples_ = samples_;
  g.normalize();
  return g;
}

double tv_distance(const GridMeasure& a, const GridMeasure& b) {
  if (a.n_s() != b.n_s() || a.n_theta() != b.n_theta()) {
    throw BadSpec("tv_distance: grid dimension mismatch");
  }
  double acc = 0.0;
  const auto& ma = a.masses();
  const auto& mb = b.masses();
  for (std::size_t i = 0; i < ma.size(); ++i) acc += std::abs(ma[i] - mb[i]);
  return 0.5 * acc;
}

}  // namespace billiard

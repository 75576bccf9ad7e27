#pragma once

#include <string>
#include <vector>

#include "billiard/errors.hpp"
#include "billiard/tolerances.hpp"

namespace billiard {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// Description of a strictly convex table boundary.
struct TableSpec {
  enum class Kind { circle, ellipse, superellipse, polar_fourier };

  Kind kind = Kind::circle;
  double radius = 1.0;            // circle
  double a = 1.0, b = 1.0;        // ellipse / superellipse semi-axes
  double exponent = 2.0;          // superellipse |x/a|^p + |y/b|^p = 1
  std::vector<double> cos_coeffs; // support function h, cos terms (k = 0, 1, ...)
  std::vector<double> sin_coeffs; // support function h, sin terms (k = 1, 2, ...)
  int resolution = 2048;

  static TableSpec circle(double radius, int resolution = 2048);
  static TableSpec ellipse(double a, double b, int resolution = 2048);
  static TableSpec superellipse(double a, double b, double p, int resolution = 2048);
  static TableSpec polar_fourier(std::vector<double> cos_coeffs,
                                 std::vector<double> sin_coeffs,
                                 int resolution = 2048);

  // "circle:1", "ellipse:2,1", "superellipse:1,1,4", or a path to a JSON spec.
  static TableSpec parse(const std::string& text);
  static TableSpec from_json_text(const std::string& json_text);

  void validate() const;  // throws BadSpec
};

struct ConvexityReport {
  double min_curvature = 0.0;
  std::vector<double> zero_curvature_arcs;  // arc-length locations of kappa ~ 0
  bool convex = true;
};

/// Arc-length parametrized strictly convex boundary. Immutable after build;
/// safe to share across threads.
class Table {
 public:
  struct BoundaryPoint {
    Vec2 position;
    double tangent_angle = 0.0;  // psi(s), angle of the oriented tangent
    double curvature = 0.0;      // kappa(s) >= 0
  };

  static Table build(const TableSpec& spec);  // throws BadSpec / NonConvex

  double length() const { return length_; }
  const TableSpec& spec() const { return spec_; }

  /// Interpolated boundary data at arc length s (reduced mod length).
  BoundaryPoint at(double s) const;

  ConvexityReport validate_convexity() const;

  double reduce_arc(double s) const;  // into [0, length)

  // --- parameter-space interface used by the collision solver -------------
  // u is the native curve parameter (angle-like, period 2*pi).
  double param_period() const { return period_; }
  Vec2 position(double u) const;
  Vec2 derivative(double u) const;  // d gamma / du (may be infinite at corners)
  double tangent_angle(double u) const;
  double curvature_at_param(double u) const;
  double param_of_arc(double s) const;  // inverse of arc_of_param, s arbitrary
  double arc_of_param(double u) const;  // monotone lift over the reals

 private:
  Table() = default;
  void build_arc_table();
  double s_of_t(double t) const;  // t in [0,1], normalized build parameter
  double t_of_s(double s) const;  // s in [0, length]
  double u_of_t(double t) const;
  double t_of_u(double u) const;
  double dsdt(double t) const;

  TableSpec spec_;
  double length_ = 0.0;
  double period_ = 0.0;
  bool exact_ = false;  // circle: all closed form, no tables
  // Uniform t-grid with Hermite data for s(t).
  std::vector<double> s_nodes_;
  std::vector<double> dsdt_nodes_;
};

}  // namespace billiard

#pragma once

#include "billiard/geometry.hpp"

namespace billiard {

/// A point (s, theta) on the phase cylinder: s in [0, |boundary|),
/// theta in [0, pi]. Points with theta in {0, pi} are fixed under the map.
struct PhasePoint {
  double s = 0.0;
  double theta = 0.0;
};

struct Jacobian2x2 {
  double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;
  double det() const { return a11 * a22 - a12 * a21; }
};

struct StepResult {
  PhasePoint next;
  double chord = 0.0;        // distance between the two collision points
  double arc_advance = 0.0;  // s-lift increment, in (0, |boundary|)
};

/// One deterministic bounce. Grazing points (theta within Tolerances::
/// grazing_theta of 0 or pi) are returned unchanged with chord 0.
StepResult map_step(const Table& table, PhasePoint x);

/// The 2x2 differential of the bounce map at an interior point whose image is
/// also interior. Throws BoundaryPoint within Tolerances::jacobian_boundary
/// of the phase boundary.
Jacobian2x2 differential(const Table& table, PhasePoint x);

/// d s1 / d theta = chord / sin(theta1); continuously extended to the phase
/// boundary, where it equals 2 / kappa.
double twist_derivative(const Table& table, PhasePoint x);

/// (s, theta) -> (s, pi - theta); conjugates the map to its inverse.
PhasePoint involution(PhasePoint x);

/// Inverse bounce, computed as involution . map_step . involution.
StepResult inverse_map(const Table& table, PhasePoint x);

}  // namespace billiard

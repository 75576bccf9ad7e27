#pragma once

namespace billiard {

// Central knobs. Every numeric threshold used by the library lives here so a
// run manifest can record them in one place.
struct Tolerances {
  // A point with theta within this of {0, pi} is treated as a fixed point.
  static constexpr double grazing_theta = 1e-9;
  // Differential refuses points closer than this to the phase boundary.
  static constexpr double jacobian_boundary = 1e-9;
  // Collision solver: bisection width in the curve parameter.
  static constexpr double solver_bisect = 1e-12;
  // Below this angle the chord-based twist derivative is dominated by solver
  // roundoff (relative error ~5e-17 / theta^2), so the curvature asymptotic
  // takes over.
  static constexpr double twist_boundary = 2e-6;
  // Curvature below this (negative) fails convexity validation.
  static constexpr double curvature_negative = -1e-10;
  // Curvature below this counts as a null-curvature point.
  static constexpr double curvature_zero = 1e-9;
  // theta excursions outside [0, pi] up to this are rounding and get clamped;
  // anything larger is a hard error.
  static constexpr double theta_rounding = 1e-12;
  // Unit-speed check at table nodes.
  static constexpr double unit_speed = 1e-8;
  // Minimum nodes in the arc-length table.
  static constexpr int min_resolution = 256;
};

}  // namespace billiard

#include "billiard/map.hpp"

#include <cmath>
#include <numbers>

namespace billiard {

namespace {

constexpr double kPi = std::numbers::pi;

// Signed area of (d, w): positive while w points to the left of d.
inline double cross(double dx, double dy, double wx, double wy) {
  return dx * wy - dy * wx;
}

}  // namespace

PhasePoint involution(PhasePoint x) { return {x.s, kPi - x.theta}; }

StepResult map_step(const Table& table, PhasePoint x) {
  const double L = table.length();
  x.s = table.reduce_arc(x.s);
  if (x.theta < Tolerances::grazing_theta || x.theta > kPi - Tolerances::grazing_theta) {
    return {x, 0.0, 0.0};  // fixed point on the phase boundary
  }

  const double P = table.param_period();
  const double u0 = table.param_of_arc(x.s);
  const Vec2 q = table.position(u0);
  const double psi = table.tangent_angle(u0);
  const double delta = psi + x.theta;  // absolute direction of the outgoing ray
  const double dx = std::cos(delta), dy = std::sin(delta);

  // f(u) = cross(d, gamma(u) - q): negative strictly between the start point
  // and the unique forward intersection, positive after it. Coarse scan over
  // 64 probes, then bisection, then a Newton polish on f.
  auto f = [&](double u) {
    const Vec2 g = table.position(u);
    return cross(dx, dy, g.x - q.x, g.y - q.y);
  };

  double lo = u0 + 1e-11 * P;
  double hi = 0.0;
  bool bracketed = false;
  // The probe at u0 + P is excluded: f vanishes there by periodicity and its
  // roundoff sign would poison the bracket.
  for (int i = 1; i < 64; ++i) {
    const double u = u0 + P * i / 64.0;
    if (f(u) > 0.0) {
      hi = u;
      bracketed = true;
      break;
    }
    lo = u;
  }
  if (!bracketed) {
    // theta close to pi: the hit sits between the last probe and u0 + P,
    // where f vanishes by periodicity. The open interval still brackets.
    hi = u0 + P;
  }
  while (hi - lo > Tolerances::solver_bisect) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? hi : lo) = mid;
  }
  double u1 = 0.5 * (lo + hi);
  for (int it = 0; it < 3; ++it) {
    const Vec2 dg = table.derivative(u1);
    const double df = cross(dx, dy, dg.x, dg.y);
    if (!std::isfinite(df) || df == 0.0) break;
    const double step = f(u1) / df;
    const double next = u1 - step;
    if (next > lo - Tolerances::solver_bisect && next < hi + Tolerances::solver_bisect) {
      u1 = next;
    } else {
      break;
    }
  }

  if (u1 - u0 < 1e-10 * P && x.theta > 1e-4) {
    // A non-grazing ray collapsing onto its own start point means the table
    // data is inconsistent.
    throw SolverFailed("collision solver collapsed onto the start point");
  }

  const Vec2 q1 = table.position(u1);
  const double chord = std::hypot(q1.x - q.x, q1.y - q.y);
  const double psi1 = table.tangent_angle(u1);
  // Reflection across the tangent line: outgoing angle relative to the
  // oriented tangent is psi1 - delta, extracted through atan2 to dodge
  // wrap-around cancellation.
  double theta1 = std::atan2(std::sin(psi1 - delta), std::cos(psi1 - delta));
  if (theta1 < 0.0) theta1 = 0.0;
  if (theta1 > kPi) theta1 = kPi;

  double advance = table.arc_of_param(u1) - table.arc_of_param(u0);
  advance -= L * std::floor(advance / L);
  if (advance == 0.0) advance = L;  // full-period hit (theta -> pi limit)
  double s1 = x.s + advance;
  if (s1 >= L) s1 -= L;

  return {{s1, theta1}, chord, advance};
}

Jacobian2x2 differential(const Table& table, PhasePoint x) {
  if (x.theta < Tolerances::jacobian_boundary ||
      x.theta > kPi - Tolerances::jacobian_boundary) {
    throw BoundaryPoint("differential undefined at the phase boundary");
  }
  const StepResult r = map_step(table, x);
  if (r.next.theta < Tolerances::jacobian_boundary ||
      r.next.theta > kPi - Tolerances::jacobian_boundary) {
    throw BoundaryPoint("differential undefined: image at the phase boundary");
  }
  const double k0 = table.at(x.s).curvature;
  const double k1 = table.at(r.next.s).curvature;
  const double t = r.chord;
  const double s0 = std::sin(x.theta);
  const double s1 = std::sin(r.next.theta);
  Jacobian2x2 j;
  j.a11 = (k0 * t - s0) / s1;
  j.a12 = t / s1;
  j.a21 = (k1 * k0 * t - k1 * s0) / s1 - k0;
  j.a22 = k1 * t / s1 - 1.0;
  return j;
}

double twist_derivative(const Table& table, PhasePoint x) {
  if (x.theta < Tolerances::twist_boundary ||
      x.theta > kPi - Tolerances::twist_boundary) {
    // Boundary limit: the image point coincides with x, so kappa is local.
    // Truncation error is O(theta), far below the solver noise here.
    return 2.0 / table.at(x.s).curvature;
  }
  const StepResult r = map_step(table, x);
  return r.chord / std::sin(r.next.theta);
}

StepResult inverse_map(const Table& table, PhasePoint x) {
  StepResult r = map_step(table, involution(x));
  r.next = involution(r.next);
  r.arc_advance = table.length() - r.arc_advance;
  return r;
}

}  // namespace billiard

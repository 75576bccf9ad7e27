#include "billiard/two_step_density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace billiard {

namespace {

constexpr double kPi = std::numbers::pi;

const double kGauss8X[4] = {0.1834346424956498, 0.5255324099163290,
                            0.7966664774136267, 0.9602898564975363};
const double kGauss8W[4] = {0.3626837833783620, 0.3137066458778873,
                            0.2223810344533745, 0.1012285362903763};

}  // namespace

TwoStepDensity::TwoStepDensity(const Table& table, const Kernel& kernel, PhasePoint x,
                               int branch_nodes)
    : table_(table), kernel_(kernel) {
  const StepResult first = map_step(table, x);
  s1_ = first.next.s;
  theta1_ = first.next.theta;

  Interval sup = kernel.support(theta1_);
  sup.lo = std::max(sup.lo, 0.0);
  sup.hi = std::min(sup.hi, kPi);
  if (!(sup.length() > 0.0)) {
    // Degenerate intermediate law; the two-step density is a point mass,
    // represented here as the zero density.
    theta_ = {sup.lo, sup.hi};
    lift_ = {s1_, s1_};
    return;
  }

  const double L = table.length();
  // Arrival arc lift over the intermediate support: start from a uniform
  // grid, then split intervals whose winding is ambiguous.
  auto advance = [&](double tp) -> double {
    if (tp < Tolerances::grazing_theta) return 0.0;
    if (tp > kPi - Tolerances::grazing_theta) return L;
    return map_step(table, {s1_, tp}).arc_advance;
  };

  theta_.resize(branch_nodes + 1);
  std::vector<double> adv(branch_nodes + 1);
  for (int i = 0; i <= branch_nodes; ++i) {
    theta_[i] = sup.lo + sup.length() * i / branch_nodes;
    adv[i] = advance(theta_[i]);
  }
  for (int pass = 0; pass < 14; ++pass) {
    bool split = false;
    std::vector<double> nt;
    std::vector<double> na;
    nt.reserve(theta_.size());
    na.reserve(theta_.size());
    for (std::size_t i = 0; i + 1 < theta_.size(); ++i) {
      nt.push_back(theta_[i]);
      na.push_back(adv[i]);
      const double raw = adv[i + 1] - adv[i];
      const double wrapped = raw - L * std::floor(raw / L);
      if (std::min(wrapped, L - wrapped) > L / 3.0 &&
          theta_[i + 1] - theta_[i] > 1e-12) {
        const double mid = 0.5 * (theta_[i] + theta_[i + 1]);
        nt.push_back(mid);
        na.push_back(advance(mid));
        split = true;
      }
    }
    nt.push_back(theta_.back());
    na.push_back(adv.back());
    theta_.swap(nt);
    adv.swap(na);
    if (!split) break;
  }

  // Unwrap: the lift increases with theta', each increment below L/3.
  lift_.resize(theta_.size());
  lift_[0] = s1_ + adv[0];
  for (std::size_t i = 1; i < theta_.size(); ++i) {
    double inc = adv[i] - adv[i - 1];
    inc -= L * std::floor(inc / L);
    if (inc > 2.0 * L / 3.0) inc -= L;  // tiny negative jitter across a wrap
    if (inc < 0.0) inc = 0.0;
    lift_[i] = lift_[i - 1] + inc;
  }
}

double TwoStepDensity::lift_at(double theta_prime, double hint) const {
  const double L = table_.length();
  double adv;
  if (theta_prime < Tolerances::grazing_theta) {
    adv = 0.0;
  } else if (theta_prime > kPi - Tolerances::grazing_theta) {
    adv = L;
  } else {
    adv = map_step(table_, {s1_, theta_prime}).arc_advance;
  }
  const double base = s1_ + adv;
  // Choose the branch closest to the hint.
  return base + L * std::round((hint - base) / L);
}

std::vector<TwoStepDensity::Root> TwoStepDensity::roots_at(double s_y) const {
  std::vector<Root> roots;
  if (lift_.size() < 2 || lift_.back() <= lift_.front()) return roots;
  const double L = table_.length();
  const double k_lo = std::ceil((lift_.front() - s_y) / L);
  const double k_hi = std::floor((lift_.back() - s_y) / L);
  for (double k = k_lo; k <= k_hi; ++k) {
    const double target = s_y + k * L;
    // Bracketing grid interval, then bisection on the lift.
    auto it = std::upper_bound(lift_.begin(), lift_.end(), target);
    if (it == lift_.begin() || it == lift_.end()) {
      if (it == lift_.end() && target <= lift_.back()) {
        it = lift_.end() - 1;
      } else if (it == lift_.begin() && target >= lift_.front()) {
        it = lift_.begin() + 1;
      } else {
        continue;
      }
    }
    const std::size_t j = it - lift_.begin();
    double ta = theta_[j - 1], tb = theta_[j];
    double la = lift_[j - 1], lb = lift_[j];
    for (int iter = 0; iter < 60 && tb - ta > 1e-13; ++iter) {
      const double tm = 0.5 * (ta + tb);
      const double lm = lift_at(tm, 0.5 * (la + lb));
      if (lm < target) {
        ta = tm;
        la = lm;
      } else {
        tb = tm;
        lb = lm;
      }
    }
    const double tp = 0.5 * (ta + tb);
    Root root;
    root.theta_prime = tp;
    double inv_twist;
    if (tp < Tolerances::grazing_theta || tp > kPi - Tolerances::grazing_theta) {
      root.theta1_prime = tp < kPi / 2.0 ? 0.0 : kPi;
      inv_twist = table_.at(s1_).curvature / 2.0;
    } else {
      const StepResult r = map_step(table_, {s1_, tp});
      root.theta1_prime = r.next.theta;
      inv_twist = (r.chord > 0.0 && std::sin(r.next.theta) > 0.0)
                      ? std::sin(r.next.theta) / r.chord
                      : table_.at(s1_).curvature / 2.0;
    }
    root.weight = kernel_.density(theta1_, tp) * inv_twist;
    if (root.weight > 0.0) roots.push_back(root);
  }
  return roots;
}

double TwoStepDensity::eval(PhasePoint y) const {
  double acc = 0.0;
  for (const Root& r : roots_at(table_.reduce_arc(y.s))) {
    acc += r.weight * kernel_.density(r.theta1_prime, y.theta);
  }
  return acc;
}

double TwoStepDensity::inv_lift(double target) const {
  auto it = std::upper_bound(lift_.begin(), lift_.end(), target);
  if (it == lift_.begin()) return theta_.front();
  if (it == lift_.end()) return theta_.back();
  const std::size_t j = it - lift_.begin();
  double ta = theta_[j - 1], tb = theta_[j];
  double la = lift_[j - 1], lb = lift_[j];
  for (int iter = 0; iter < 60 && tb - ta > 1e-13; ++iter) {
    const double tm = 0.5 * (ta + tb);
    const double lm = lift_at(tm, 0.5 * (la + lb));
    if (lm < target) {
      ta = tm;
      la = lm;
    } else {
      tb = tm;
      lb = lm;
    }
  }
  return 0.5 * (ta + tb);
}

namespace {

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm,
                        double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double flm = f(0.5 * (a + m)), frm = f(0.5 * (m + b));
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

}  // namespace

double TwoStepDensity::cell_integral(double s_lo, double s_hi, double theta_lo,
                                     double theta_hi) const {
  if (lift_.size() < 2 || lift_.back() <= lift_.front()) return 0.0;
  const double L = table_.length();
  // Mass landing in the rectangle, integrated over the intermediate angle:
  // the preimage of [s_lo, s_hi] under the monotone lift is a union of
  // intervals, one per winding.
  auto integrand = [&](double tp) {
    double theta1p;
    if (tp < Tolerances::grazing_theta) {
      theta1p = 0.0;
    } else if (tp > kPi - Tolerances::grazing_theta) {
      theta1p = kPi;
    } else {
      theta1p = map_step(table_, {s1_, tp}).next.theta;
    }
    const Interval sup = kernel_.support(theta1p);
    const double len = sup.length();
    if (len <= 0.0) return 0.0;
    const double overlap = std::min(sup.hi, theta_hi) - std::max(sup.lo, theta_lo);
    if (overlap <= 0.0) return 0.0;
    return kernel_.density(theta1_, tp) * overlap / len;
  };
  double acc = 0.0;
  const double k_lo = std::ceil((lift_.front() - s_hi) / L);
  const double k_hi = std::floor((lift_.back() - s_lo) / L);
  for (double k = k_lo; k <= k_hi; ++k) {
    const double ta = inv_lift(s_lo + k * L);
    const double tb = inv_lift(s_hi + k * L);
    if (tb - ta < 1e-14) continue;
    const double fa = integrand(ta), fb = integrand(tb);
    const double fm = integrand(0.5 * (ta + tb));
    const double whole = (tb - ta) / 6.0 * (fa + 4.0 * fm + fb);
    acc += adaptive_simpson(integrand, ta, tb, fa, fm, fb, whole, 1e-9, 24);
  }
  return acc;
}

double TwoStepDensity::total_integral(int panels) const {
  const double L = table_.length();
  // The integrand in s is smooth except where a branch endpoint crosses;
  // split the period there.
  std::vector<double> cuts = {0.0, L};
  for (double b : {table_.reduce_arc(lift_.front()), table_.reduce_arc(lift_.back())}) {
    if (b > 1e-12 && b < L - 1e-12) cuts.push_back(b);
  }
  std::sort(cuts.begin(), cuts.end());
  double acc = 0.0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const int np = std::max(4, static_cast<int>(panels * (cuts[c + 1] - cuts[c]) / L));
    const double w = (cuts[c + 1] - cuts[c]) / np;
    for (int p = 0; p < np; ++p) {
      const double mid = cuts[c] + (p + 0.5) * w;
      for (int g = 0; g < 4; ++g) {
        for (double sign : {-1.0, 1.0}) {
          const double s = mid + sign * 0.5 * w * kGauss8X[g];
          double val = 0.0;
          for (const Root& r : roots_at(s)) val += r.weight;
          acc += 0.5 * w * kGauss8W[g] * val;
        }
      }
    }
  }
  return acc;
}

double two_step_density(const Table& table, const Kernel& kernel, PhasePoint x,
                        PhasePoint y) {
  return TwoStepDensity(table, kernel, x).eval(y);
}

}  // namespace billiard

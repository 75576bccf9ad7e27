#include "billiard/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <json.hpp>

namespace billiard {

namespace {
constexpr double kPi = std::numbers::pi;
}

Interval IntervalTable::eval(double th) const {
  auto it = std::upper_bound(theta.begin(), theta.end(), th);
  std::size_t i = (it == theta.begin()) ? 0 : (it - theta.begin() - 1);
  if (i >= theta.size() - 1) i = theta.size() - 2;
  const double w = (th - theta[i]) / (theta[i + 1] - theta[i]);
  const double cw = std::clamp(w, 0.0, 1.0);
  return {lo[i] + cw * (lo[i + 1] - lo[i]), hi[i] + cw * (hi[i + 1] - hi[i])};
}

Kernel Kernel::example1(double eps) {
  if (!(eps > 0.0 && eps < kPi / 2.0)) throw BadSpec("epsilon must be in (0, pi/2)");
  return Kernel(Family::example1, eps);
}

Kernel Kernel::example2(double eps) {
  if (!(eps > 0.0 && eps < kPi / 2.0)) throw BadSpec("epsilon must be in (0, pi/2)");
  return Kernel(Family::example2, eps);
}

Kernel Kernel::example3(double eps) {
  if (!(eps > 0.0 && eps < kPi / 2.0)) throw BadSpec("epsilon must be in (0, pi/2)");
  return Kernel(Family::example3, eps);
}

Kernel Kernel::custom(IntervalTable table, double eps) {
  if (!(eps > 0.0 && eps < kPi / 2.0)) throw BadSpec("epsilon must be in (0, pi/2)");
  if (table.theta.size() < 2 || table.theta.size() != table.lo.size() ||
      table.theta.size() != table.hi.size()) {
    throw BadSpec("custom kernel table needs matching theta/lo/hi arrays");
  }
  if (std::abs(table.theta.front()) > 1e-12 || std::abs(table.theta.back() - kPi) > 1e-12) {
    throw BadSpec("custom kernel table must span [0, pi]");
  }
  Kernel k(Family::custom_uniform, eps);
  k.table_ = std::move(table);
  // Containment and positive length, sampled densely at construction.
  for (int i = 0; i <= 10000; ++i) {
    const double th = kPi * i / 10000.0;
    const Interval sup = k.table_.eval(th);
    if (!(sup.lo >= -1e-12 && sup.hi <= kPi + 1e-12 && sup.length() > 0.0)) {
      throw BadSpec("custom kernel support leaves [0, pi] or degenerates");
    }
  }
  return k;
}

Kernel Kernel::parse(const std::string& family, double eps) {
  if (family == "example1") return example1(eps);
  if (family == "example2") return example2(eps);
  if (family == "example3") return example3(eps);
  throw BadSpec("unknown kernel family: " + family);
}

Kernel Kernel::custom_from_json_text(const std::string& json_text, double eps) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  IntervalTable t;
  t.theta = j.at("theta").get<std::vector<double>>();
  t.lo = j.at("lo").get<std::vector<double>>();
  t.hi = j.at("hi").get<std::vector<double>>();
  return custom(std::move(t), eps);
}

Interval Kernel::support(double theta) const {
  const double eps = epsilon_;
  switch (family_) {
    case Family::example1: {
      const double the = std::min(std::max(theta, eps), kPi - eps);
      return {the - eps, the + eps};
    }
    case Family::example2:
      return {std::max(theta - eps, 0.0), std::min(theta + eps, kPi)};
    case Family::example3:
      if (theta < eps) return {0.0, 2.0 * theta};
      if (theta > kPi - eps) return {2.0 * theta - kPi, kPi};
      return {theta - eps, theta + eps};
    case Family::custom_uniform:
      return table_.eval(theta);
  }
  return {};
}

double Kernel::density(double theta, double theta_prime) const {
  const Interval sup = support(theta);
  const double len = sup.length();
  if (len <= 0.0) return 0.0;  // degenerate (example3 at theta = 0 or pi)
  return sup.contains(theta_prime) ? 1.0 / len : 0.0;
}

double Kernel::sample(double theta, double u01) const {
  const Interval sup = support(theta);
  return sup.lo + u01 * sup.length();
}

double Kernel::sample(double theta, RngStream& rng) const {
  return sample(theta, rng.uniform01());
}

}  // namespace billiard

#include "billiard/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace billiard {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// 32-point Gauss-Legendre nodes/weights on [-1, 1] (positive half; mirrored).
constexpr int kGlHalf = 16;
constexpr double kGlX[kGlHalf] = {
    0.0483076656877383162348126, 0.1444719615827964934851864,
    0.2392873622521370745446032, 0.3318686022821276497799168,
    0.4213512761306353453641194, 0.5068999089322293900237475,
    0.5877157572407623290407455, 0.6630442669302152009751152,
    0.7321821187402896803874267, 0.7944837959679424069630973,
    0.8493676137325699701336930, 0.8963211557660521239653072,
    0.9349060759377396891709191, 0.9647622555875064307738119,
    0.9856115115452683354001750, 0.9972638618494815635449811};
constexpr double kGlW[kGlHalf] = {
    0.0965400885147278005667648, 0.0956387200792748594190820,
    0.0938443990808045656391802, 0.0911738786957638847128686,
    0.0876520930044038111427715, 0.0833119242269467552221991,
    0.0781938957870703064717409, 0.0723457941088485062253994,
    0.0658222227763618468376501, 0.0586840934785355471452836,
    0.0509980592623761761961632, 0.0428358980222266806568786,
    0.0342738629130214331026877, 0.0253920653092620594557526,
    0.0162743947309056706051706, 0.0070186100094700966004071};

template <typename F>
double gauss32(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < kGlHalf; ++i) {
    acc += kGlW[i] * (f(c - h * kGlX[i]) + f(c + h * kGlX[i]));
  }
  return acc * h;
}

double wrap_2pi(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a;
}

// Signed power u(x) = sgn(x) |x|^alpha used by the superellipse parametrization.
double spow(double x, double alpha) {
  return (x >= 0.0 ? 1.0 : -1.0) * std::pow(std::abs(x), alpha);
}

}  // namespace

// ---------------------------------------------------------------------------
// TableSpec

TableSpec TableSpec::circle(double radius, int resolution) {
  TableSpec s;
  s.kind = Kind::circle;
  s.radius = radius;
  s.resolution = resolution;
  return s;
}

TableSpec TableSpec::ellipse(double a, double b, int resolution) {
  TableSpec s;
  s.kind = Kind::ellipse;
  s.a = a;
  s.b = b;
  s.resolution = resolution;
  return s;
}

TableSpec TableSpec::superellipse(double a, double b, double p, int resolution) {
  TableSpec s;
  s.kind = Kind::superellipse;
  s.a = a;
  s.b = b;
  s.exponent = p;
  s.resolution = resolution;
  return s;
}

TableSpec TableSpec::polar_fourier(std::vector<double> cos_coeffs,
                                   std::vector<double> sin_coeffs, int resolution) {
  TableSpec s;
  s.kind = Kind::polar_fourier;
  s.cos_coeffs = std::move(cos_coeffs);
  s.sin_coeffs = std::move(sin_coeffs);
  s.resolution = resolution;
  return s;
}

void TableSpec::validate() const {
  if (resolution < Tolerances::min_resolution) {
    throw BadSpec("resolution must be >= 256");
  }
  switch (kind) {
    case Kind::circle:
      if (!(radius > 0.0)) throw BadSpec("circle radius must be positive");
      break;
    case Kind::ellipse:
      if (!(a > 0.0) || !(b > 0.0)) throw BadSpec("ellipse semi-axes must be positive");
      break;
    case Kind::superellipse:
      if (!(a > 0.0) || !(b > 0.0)) throw BadSpec("superellipse semi-axes must be positive");
      if (!(exponent >= 2.0)) throw BadSpec("superellipse exponent must be >= 2");
      break;
    case Kind::polar_fourier:
      if (cos_coeffs.empty() || !(cos_coeffs[0] > 0.0)) {
        throw BadSpec("polar_fourier needs a positive constant term");
      }
      break;
  }
}

TableSpec TableSpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  auto nums = [&]() {
    std::vector<double> out;
    if (colon == std::string::npos) return out;
    std::stringstream ss(text.substr(colon + 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
  };
  if (head == "circle") {
    auto v = nums();
    if (v.size() != 1) throw BadSpec("circle shorthand: circle:<radius>");
    return circle(v[0]);
  }
  if (head == "ellipse") {
    auto v = nums();
    if (v.size() != 2) throw BadSpec("ellipse shorthand: ellipse:<a>,<b>");
    return ellipse(v[0], v[1]);
  }
  if (head == "superellipse") {
    auto v = nums();
    if (v.size() != 3) throw BadSpec("superellipse shorthand: superellipse:<a>,<b>,<p>");
    return superellipse(v[0], v[1], v[2]);
  }
  // Otherwise treat as a path to a JSON spec.
  std::ifstream in(text);
  if (!in) throw BadSpec("cannot open table spec file: " + text);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

TableSpec TableSpec::from_json_text(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  TableSpec s;
  const std::string kind = j.at("kind").get<std::string>();
  if (j.contains("resolution")) s.resolution = j["resolution"].get<int>();
  if (kind == "circle") {
    s.kind = Kind::circle;
    s.radius = j.at("radius").get<double>();
  } else if (kind == "ellipse") {
    s.kind = Kind::ellipse;
    s.a = j.at("a").get<double>();
    s.b = j.at("b").get<double>();
  } else if (kind == "superellipse") {
    s.kind = Kind::superellipse;
    s.a = j.at("a").get<double>();
    s.b = j.at("b").get<double>();
    s.exponent = j.at("p").get<double>();
  } else if (kind == "polar_fourier") {
    s.kind = Kind::polar_fourier;
    s.cos_coeffs = j.at("cos").get<std::vector<double>>();
    if (j.contains("sin")) s.sin_coeffs = j["sin"].get<std::vector<double>>();
  } else {
    throw BadSpec("unknown table kind: " + kind);
  }
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------
// Shape evaluation in the native parameter u (period 2*pi).

Vec2 Table::position(double u) const {
  switch (spec_.kind) {
    case TableSpec::Kind::circle:
      return {spec_.radius * std::cos(u), spec_.radius * std::sin(u)};
    case TableSpec::Kind::ellipse:
      return {spec_.a * std::cos(u), spec_.b * std::sin(u)};
    case TableSpec::Kind::superellipse: {
      const double al = 2.0 / spec_.exponent;
      return {spec_.a * spow(std::cos(u), al), spec_.b * spow(std::sin(u), al)};
    }
    case TableSpec::Kind::polar_fourier: {
      double h = 0.0, hp = 0.0;
      for (std::size_t k = 0; k < spec_.cos_coeffs.size(); ++k) {
        h += spec_.cos_coeffs[k] * std::cos(k * u);
        hp -= spec_.cos_coeffs[k] * k * std::sin(k * u);
      }
      for (std::size_t j = 0; j < spec_.sin_coeffs.size(); ++j) {
        const double k = static_cast<double>(j + 1);
        h += spec_.sin_coeffs[j] * std::sin(k * u);
        hp += spec_.sin_coeffs[j] * k * std::cos(k * u);
      }
      const double c = std::cos(u), s = std::sin(u);
      return {h * c - hp * s, h * s + hp * c};
    }
  }
  return {};
}

Vec2 Table::derivative(double u) const {
  switch (spec_.kind) {
    case TableSpec::Kind::circle:
      return {-spec_.radius * std::sin(u), spec_.radius * std::cos(u)};
    case TableSpec::Kind::ellipse:
      return {-spec_.a * std::sin(u), spec_.b * std::cos(u)};
    case TableSpec::Kind::superellipse: {
      const double al = 2.0 / spec_.exponent;
      const double c = std::cos(u), s = std::sin(u);
      // d/du sgn(c)|c|^al = -al |c|^(al-1) sin u, and symmetrically for y.
      return {-spec_.a * al * std::pow(std::abs(c), al - 1.0) * s,
              spec_.b * al * std::pow(std::abs(s), al - 1.0) * c};
    }
    case TableSpec::Kind::polar_fourier: {
      double rho = 0.0;  // h + h'' = radius of curvature
      for (std::size_t k = 0; k < spec_.cos_coeffs.size(); ++k) {
        rho += spec_.cos_coeffs[k] * (1.0 - double(k) * double(k)) * std::cos(k * u);
      }
      for (std::size_t j = 0; j < spec_.sin_coeffs.size(); ++j) {
        const double k = static_cast<double>(j + 1);
        rho += spec_.sin_coeffs[j] * (1.0 - k * k) * std::sin(k * u);
      }
      return {-rho * std::sin(u), rho * std::cos(u)};
    }
  }
  return {};
}

double Table::tangent_angle(double u) const {
  switch (spec_.kind) {
    case TableSpec::Kind::circle:
    case TableSpec::Kind::polar_fourier:
      return wrap_2pi(u + kPi / 2.0);
    default: {
      const Vec2 d = derivative(u);
      return wrap_2pi(std::atan2(d.y, d.x));
    }
  }
}

double Table::curvature_at_param(double u) const {
  switch (spec_.kind) {
    case TableSpec::Kind::circle:
      return 1.0 / spec_.radius;
    case TableSpec::Kind::ellipse: {
      const double c = std::cos(u), s = std::sin(u);
      const double q = spec_.a * spec_.a * s * s + spec_.b * spec_.b * c * c;
      return spec_.a * spec_.b / (q * std::sqrt(q));
    }
    case TableSpec::Kind::superellipse: {
      const double al = 2.0 / spec_.exponent;
      const double A = spec_.a * al, B = spec_.b * al;
      const double c = std::cos(u), s = std::sin(u);
      const double ac = std::abs(c), as = std::abs(s);
      // kappa = A B (2-al) |c|^(al-1) |s|^(al-1) / speed^3; use the corner
      // asymptotics where the direct form degenerates to inf/inf.
      if (as < 1e-8) {
        return (A * (2.0 - al) / (B * B)) * std::pow(ac, al - 4.0) *
               std::pow(as, 2.0 - 2.0 * al);
      }
      if (ac < 1e-8) {
        return (B * (2.0 - al) / (A * A)) * std::pow(as, al - 4.0) *
               std::pow(ac, 2.0 - 2.0 * al);
      }
      const double sp2 = A * A * std::pow(ac, 2.0 * al - 2.0) * s * s +
                         B * B * std::pow(as, 2.0 * al - 2.0) * c * c;
      return A * B * (2.0 - al) * std::pow(ac, al - 1.0) * std::pow(as, al - 1.0) /
             (sp2 * std::sqrt(sp2));
    }
    case TableSpec::Kind::polar_fourier: {
      const Vec2 d = derivative(u);
      const double rho = std::hypot(d.x, d.y);
      return 1.0 / rho;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Build parameter t in [0,1] -> u. Identity scaling except the superellipse,
// which clusters nodes at the four axis corners so the arc-length table sees a
// smooth integrand (s ~ v^2 locally when k = p).

namespace {

double cluster_k(double p) { return std::clamp(p, 2.0, 8.0); }

double cluster_w(double v, double k) {
  if (v <= 0.0) return 0.0;
  if (v >= 1.0) return 1.0;
  const double A = std::pow(v, k), B = std::pow(1.0 - v, k);
  return A / (A + B);
}

double cluster_w_inv(double w, double k) {
  if (w <= 0.0) return 0.0;
  if (w >= 1.0) return 1.0;
  const double r = std::pow(w / (1.0 - w), 1.0 / k);
  return r / (1.0 + r);
}

double cluster_dw(double v, double k) {
  if (v <= 0.0 || v >= 1.0) return 0.0;
  const double A = std::pow(v, k), B = std::pow(1.0 - v, k);
  const double den = (A + B) * (A + B);
  return k * (std::pow(v, k - 1.0) * B + A * std::pow(1.0 - v, k - 1.0)) / den;
}

}  // namespace

double Table::u_of_t(double t) const {
  if (spec_.kind != TableSpec::Kind::superellipse) return kTwoPi * t;
  const double k = cluster_k(spec_.exponent);
  double q = std::floor(t * 4.0);
  if (q > 3.0) q = 3.0;
  const double v = t * 4.0 - q;
  return q * (kPi / 2.0) + (kPi / 2.0) * cluster_w(v, k);
}

double Table::t_of_u(double u) const {
  if (spec_.kind != TableSpec::Kind::superellipse) return u / kTwoPi;
  const double k = cluster_k(spec_.exponent);
  double q = std::floor(u / (kPi / 2.0));
  if (q > 3.0) q = 3.0;
  if (q < 0.0) q = 0.0;
  const double w = (u - q * (kPi / 2.0)) / (kPi / 2.0);
  return (q + cluster_w_inv(w, k)) / 4.0;
}

double Table::dsdt(double t) const {
  double dudt;
  double u;
  if (spec_.kind == TableSpec::Kind::superellipse) {
    const double k = cluster_k(spec_.exponent);
    double q = std::floor(t * 4.0);
    if (q > 3.0) q = 3.0;
    const double v = t * 4.0 - q;
    dudt = kTwoPi * cluster_dw(v, k);
    u = q * (kPi / 2.0) + (kPi / 2.0) * cluster_w(v, k);
  } else {
    dudt = kTwoPi;
    u = kTwoPi * t;
  }
  const Vec2 d = derivative(u);
  const double val = std::hypot(d.x, d.y) * dudt;
  // Corner limit: clustered dudt -> 0 beats the speed blow-up.
  return std::isfinite(val) ? val : 0.0;
}

void Table::build_arc_table() {
  const int n = spec_.resolution;
  s_nodes_.assign(n + 1, 0.0);
  dsdt_nodes_.assign(n + 1, 0.0);
  for (int i = 0; i <= n; ++i) {
    dsdt_nodes_[i] = dsdt(static_cast<double>(i) / n);
  }
  for (int i = 1; i <= n; ++i) {
    const double a = static_cast<double>(i - 1) / n;
    const double b = static_cast<double>(i) / n;
    s_nodes_[i] = s_nodes_[i - 1] + gauss32([this](double t) { return dsdt(t); }, a, b);
  }
  length_ = s_nodes_[n];
}

namespace {

// Cubic Hermite on [x0, x1] with values y0, y1 and slopes m0, m1.
double hermite(double x, double x0, double x1, double y0, double y1, double m0,
               double m1) {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * m0 +
         (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * m1;
}

double hermite_deriv(double x, double x0, double x1, double y0, double y1,
                     double m0, double m1) {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const double t2 = t * t;
  return ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * h * m0 +
          (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * h * m1) /
         h;
}

}  // namespace

double Table::s_of_t(double t) const {
  if (exact_) return t * length_;
  const int n = spec_.resolution;
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return length_;
  int i = static_cast<int>(t * n);
  if (i >= n) i = n - 1;
  const double x0 = static_cast<double>(i) / n;
  const double x1 = static_cast<double>(i + 1) / n;
  return hermite(t, x0, x1, s_nodes_[i], s_nodes_[i + 1], dsdt_nodes_[i],
                 dsdt_nodes_[i + 1]);
}

double Table::t_of_s(double s) const {
  if (exact_) return s / length_;
  const int n = spec_.resolution;
  if (s <= 0.0) return 0.0;
  if (s >= length_) return 1.0;
  // Locate the bracketing node interval, then invert the Hermite segment.
  int lo = 0, hi = n;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    (s_nodes_[mid] <= s ? lo : hi) = mid;
  }
  const double x0 = static_cast<double>(lo) / n;
  const double x1 = static_cast<double>(lo + 1) / n;
  const double y0 = s_nodes_[lo], y1 = s_nodes_[lo + 1];
  const double m0 = dsdt_nodes_[lo], m1 = dsdt_nodes_[lo + 1];
  double a = x0, b = x1;
  double t = x0 + (x1 - x0) * (s - y0) / (y1 - y0);
  for (int it = 0; it < 60; ++it) {
    const double f = hermite(t, x0, x1, y0, y1, m0, m1) - s;
    if (f > 0.0) {
      b = t;
    } else {
      a = t;
    }
    if (std::abs(f) < 1e-14 * length_) break;
    const double df = hermite_deriv(t, x0, x1, y0, y1, m0, m1);
    double next = (df > 0.0) ? t - f / df : 0.5 * (a + b);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    if (b - a < 1e-17) break;
    t = next;
  }
  return t;
}

double Table::reduce_arc(double s) const {
  s = std::fmod(s, length_);
  if (s < 0.0) s += length_;
  return s;
}

double Table::param_of_arc(double s) const {
  if (exact_) return reduce_arc(s) / spec_.radius;
  return u_of_t(t_of_s(reduce_arc(s)));
}

double Table::arc_of_param(double u) const {
  const double n = std::floor(u / period_);
  const double ur = u - n * period_;
  if (exact_) return spec_.radius * ur + n * length_;
  return s_of_t(t_of_u(ur)) + n * length_;
}

Table::BoundaryPoint Table::at(double s) const {
  const double u = param_of_arc(s);
  return {position(u), tangent_angle(u), curvature_at_param(u)};
}

ConvexityReport Table::validate_convexity() const {
  ConvexityReport rep;
  rep.min_curvature = std::numeric_limits<double>::infinity();
  const int n = spec_.resolution * 2;  // nodes plus midpoints
  std::vector<double> kappa(n), arcs(n);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / n;
    const double u = u_of_t(t);
    kappa[i] = curvature_at_param(u);
    arcs[i] = s_of_t(t);
    rep.min_curvature = std::min(rep.min_curvature, kappa[i]);
  }
  rep.convex = rep.min_curvature >= Tolerances::curvature_negative;
  // Cluster consecutive below-threshold samples into isolated zeros.
  std::vector<char> low(n);
  int i0 = -1;
  for (int i = 0; i < n; ++i) {
    low[i] = kappa[i] < Tolerances::curvature_zero;
    if (!low[i] && i0 < 0) i0 = i;
  }
  if (i0 < 0) {
    // Degenerate: curvature below threshold everywhere.
    rep.zero_curvature_arcs.push_back(arcs[0]);
    return rep;
  }
  for (int k = 0; k < n; ++k) {
    const int i = (i0 + k) % n;
    if (!low[i]) continue;
    double best_k = kappa[i], best_s = arcs[i];
    while (k + 1 < n && low[(i0 + k + 1) % n]) {
      ++k;
      const int j = (i0 + k) % n;
      if (kappa[j] < best_k) {
        best_k = kappa[j];
        best_s = arcs[j];
      }
    }
    rep.zero_curvature_arcs.push_back(best_s);
  }
  std::sort(rep.zero_curvature_arcs.begin(), rep.zero_curvature_arcs.end());
  return rep;
}

Table Table::build(const TableSpec& spec) {
  spec.validate();
  Table t;
  t.spec_ = spec;
  t.period_ = kTwoPi;
  if (spec.kind == TableSpec::Kind::circle) {
    t.exact_ = true;
    t.length_ = kTwoPi * spec.radius;
    return t;
  }
  if (spec.kind == TableSpec::Kind::polar_fourier) {
    // Radius of curvature h + h'' must stay positive, and the origin must be
    // interior (h > 0) for the support-function description to be a boundary.
    const int n = spec.resolution * 4;
    for (int i = 0; i < n; ++i) {
      const double u = kTwoPi * i / n;
      const Vec2 d = t.derivative(u);
      const double rho = std::hypot(d.x, d.y);
      // derivative() returns rho*(-sin, cos); recover the sign of rho.
      const double signed_rho = -d.x * std::sin(u) + d.y * std::cos(u);
      if (!(signed_rho > 1e-12)) {
        throw NonConvex("polar_fourier table has non-positive radius of curvature");
      }
      (void)rho;
    }
  }
  t.build_arc_table();
  const ConvexityReport rep = t.validate_convexity();
  if (!rep.convex) {
    throw NonConvex("table has curvature below tolerance");
  }
  return t;
}

}  // namespace billiard

#include "billiard/reachability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "billiard/parallel.hpp"

namespace billiard {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::int64_t ReachMask::marked_count() const {
  std::int64_t n = 0;
  for (auto c : cells) n += c;
  return n;
}

double ReachMask::coverage() const {
  return static_cast<double>(marked_count()) / static_cast<double>(cells.size());
}

ReachMask ReachMask::from_start(const Table& table, PhasePoint start, int n_s,
                                int n_theta) {
  ReachMask m;
  m.n_s = n_s;
  m.n_theta = n_theta;
  m.cells.assign(std::size_t(n_s) * n_theta, 0);
  const GridMeasure proto(n_s, n_theta, table.length());
  m.cells[proto.cell_of(start)] = 1;
  return m;
}

ReachMask reach_step(const Table& table, double epsilon, const ReachMask& mask, int sub) {
  if (!(epsilon > 0.0 && epsilon < kPi / 2.0)) throw BadSpec("epsilon must be in (0, pi/2)");
  ReachMask out;
  out.n_s = mask.n_s;
  out.n_theta = mask.n_theta;
  out.generation = mask.generation + 1;
  out.cells.assign(mask.cells.size(), 0);

  const double L = table.length();
  const double ds = L / mask.n_s;
  const double dth = kPi / mask.n_theta;

  std::vector<int> marked;
  for (int i = 0; i < mask.n_s * mask.n_theta; ++i) {
    if (mask.cells[i]) marked.push_back(i);
  }

  // Per-cell successor masks computed independently, merged afterwards.
  std::vector<std::vector<std::uint8_t>> partial(marked.size());
  parallel_for(static_cast<std::int64_t>(marked.size()), [&](std::int64_t idx) {
    std::vector<std::uint8_t> local(out.cells.size(), 0);
    const int cell = marked[idx];
    const int is = cell / mask.n_theta;
    const int it = cell % mask.n_theta;
    for (int a = 0; a < sub; ++a) {
      for (int b = 0; b < sub; ++b) {
        const PhasePoint xi{(is + (a + 0.5) / sub) * ds, (it + (b + 0.5) / sub) * dth};
        const StepResult r = map_step(table, xi);
        const double lo = std::max(0.0, r.next.theta - epsilon);
        const double hi = std::min(kPi, r.next.theta + epsilon);
        int js = static_cast<int>(r.next.s / ds);
        if (js >= mask.n_s) js = mask.n_s - 1;
        int jlo = static_cast<int>(lo / dth);
        int jhi = static_cast<int>(hi / dth);
        jlo = std::clamp(jlo, 0, mask.n_theta - 1);
        jhi = std::clamp(jhi, 0, mask.n_theta - 1);
        for (int j = jlo; j <= jhi; ++j) local[js * mask.n_theta + j] = 1;
      }
    }
    partial[idx] = std::move(local);
  });
  for (const auto& local : partial) {
    for (std::size_t i = 0; i < out.cells.size(); ++i) out.cells[i] |= local[i];
  }
  return out;
}

CoverageResult coverage_horizon(const Table& table, double epsilon, PhasePoint start,
                                int n_s, int n_theta, int n_max, int sub) {
  CoverageResult res;
  ReachMask mask = ReachMask::from_start(table, start, n_s, n_theta);
  res.coverage.push_back(mask.coverage());
  for (int n = 1; n <= n_max; ++n) {
    mask = reach_step(table, epsilon, mask, sub);
    res.coverage.push_back(mask.coverage());
    if (!res.n_full && mask.marked_count() == static_cast<std::int64_t>(mask.cells.size())) {
      res.n_full = n;
      break;
    }
  }
  return res;
}

namespace {

double boundary_distance(double theta) { return std::min(theta, kPi - theta); }

// Minimum boundary distance of theta(T^k x) over a sample grid of the band
// M_a, k = +2, -1, -2 selected by mode.
struct BandScan {
  double min_dist = kPi;
  PhasePoint argmin;
};

template <typename F>
BandScan scan_band(const Table& table, double a, int grid, const F& angle_of) {
  BandScan scan;
  const double L = table.length();
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j <= grid; ++j) {
      // Include the exact band edges; extremes live there.
      const PhasePoint x{L * i / grid, a + (kPi - 2.0 * a) * j / grid};
      const double d = boundary_distance(angle_of(x));
      if (d < scan.min_dist) {
        scan.min_dist = d;
        scan.argmin = x;
      }
    }
  }
  return scan;
}

}  // namespace

bool band_inclusion_holds(const Table& table, double epsilon, double c1, double c2,
                          int grid) {
  if (!(0.0 < c2 && c2 < c1 && c1 < epsilon)) return false;
  const auto back1 = [&](PhasePoint x) { return inverse_map(table, x).next.theta; };
  const auto back2 = [&](PhasePoint x) {
    return inverse_map(table, inverse_map(table, x).next).next.theta;
  };
  const auto fwd2 = [&](PhasePoint x) {
    return map_step(table, map_step(table, x).next).next.theta;
  };
  // M_eps in T(M_c1)  <=>  theta(T^-1 y) stays c1 away from the boundary.
  if (scan_band(table, epsilon, grid, back1).min_dist < c1) return false;
  // M_c1 in T^2(M_c2)
  if (scan_band(table, c1, grid, back2).min_dist < c2) return false;
  // T^2(M_c1) in M_c2
  if (scan_band(table, c1, grid, fwd2).min_dist < c2) return false;
  return true;
}

BandCertificate band_inclusion_check(const Table& table, double epsilon, int grid) {
  if (!(epsilon > 0.0 && epsilon < kPi / 2.0)) throw BadSpec("epsilon must be in (0, pi/2)");
  BandCertificate cert;
  const auto back1 = [&](PhasePoint x) { return inverse_map(table, x).next.theta; };
  const auto back2 = [&](PhasePoint x) {
    return inverse_map(table, inverse_map(table, x).next).next.theta;
  };
  const auto fwd2 = [&](PhasePoint x) {
    return map_step(table, map_step(table, x).next).next.theta;
  };

  const BandScan s1 = scan_band(table, epsilon, grid, back1);
  const double c1 = std::min(s1.min_dist, epsilon * (1.0 - 1e-6)) * (1.0 - 1e-9);
  if (!(c1 > 0.0)) {
    cert.failures.push_back(s1.argmin);
    return cert;
  }
  const BandScan s2 = scan_band(table, c1, grid, back2);
  const BandScan s3 = scan_band(table, c1, grid, fwd2);
  const double c2 = std::min({s2.min_dist, s3.min_dist, c1 * (1.0 - 1e-6)}) * (1.0 - 1e-9);
  if (!(c2 > 0.0)) {
    cert.failures.push_back(s2.min_dist <= s3.min_dist ? s2.argmin : s3.argmin);
    return cert;
  }
  cert.found = true;
  cert.c1 = c1;
  cert.c2 = c2;
  return cert;
}

DoeblinResult doeblin_lower_bound(const Table& table, const Kernel& kernel, int n_steps,
                                  const std::vector<PhasePoint>& probe_starts, int n_s,
                                  int n_theta, std::int64_t chains, std::uint64_t seed,
                                  std::int64_t budget) {
  if (n_steps < 2) throw BadSpec("doeblin_lower_bound needs N >= 2");
  if (probe_starts.empty()) throw BadSpec("doeblin_lower_bound needs probe starts");
  DoeblinResult res;
  res.b_hat = std::numeric_limits<double>::infinity();
  ChainConfig cfg;
  cfg.table = &table;
  cfg.kernel = &kernel;
  cfg.seed = seed;
  cfg.n_steps = n_steps;
  cfg.n_chains = chains;
  cfg.budget = budget;
  for (std::size_t p = 0; p < probe_starts.size(); ++p) {
    cfg.seed = seed + p;  // independent ensembles per probe
    cfg.init = InitialCondition::at(probe_starts[p]);
    const auto finals = run_ensemble(cfg);
    GridMeasure g = GridMeasure::from_points(finals, n_s, n_theta, table.length());
    std::int64_t unhit = 0;
    double min_mass = std::numeric_limits<double>::infinity();
    for (double m : g.masses()) {
      if (m == 0.0) ++unhit;
      min_mass = std::min(min_mass, m);
    }
    res.unhit_cells += unhit;
    res.worst_coverage = std::min(
        res.worst_coverage,
        1.0 - static_cast<double>(unhit) / static_cast<double>(g.masses().size()));
    res.b_hat = std::min(res.b_hat, min_mass / g.cell_area());
  }
  return res;
}

}  // namespace billiard

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "billiard/chain.hpp"
#include "billiard/grid_measure.hpp"

namespace billiard {

/// Cell mask over the phase grid marking states reachable by following the
/// deterministic bounce with per-step angle errors below epsilon.
struct ReachMask {
  int n_s = 0;
  int n_theta = 0;
  int generation = 0;
  std::vector<std::uint8_t> cells;

  bool marked(int i_s, int i_theta) const { return cells[i_s * n_theta + i_theta] != 0; }
  void mark(int i_s, int i_theta) { cells[i_s * n_theta + i_theta] = 1; }
  std::int64_t marked_count() const;
  double coverage() const;

  static ReachMask from_start(const Table& table, PhasePoint start, int n_s, int n_theta);
};

/// One generation of the perturbed-orbit image: each marked cell is sampled
/// on a sub x sub interior lattice, every sample is bounced, and cells
/// meeting {s1} x (theta1 - eps, theta1 + eps) get marked.
ReachMask reach_step(const Table& table, double epsilon, const ReachMask& mask,
                     int sub = 3);

struct CoverageResult {
  std::optional<int> n_full;       // first generation with 100% cell coverage
  std::vector<double> coverage;    // fraction per generation, index = generation
};

CoverageResult coverage_horizon(const Table& table, double epsilon, PhasePoint start,
                                int n_s, int n_theta, int n_max, int sub = 3);

/// Numerical certificates 0 < c2 < c1 < eps for the band inclusions
/// M_eps in T(M_c1), M_c1 in T^2(M_c2), T^2(M_c1) in M_c2.
struct BandCertificate {
  bool found = false;
  double c1 = 0.0;
  double c2 = 0.0;
  std::vector<PhasePoint> failures;  // sample points violating an inclusion
};

bool band_inclusion_holds(const Table& table, double epsilon, double c1, double c2,
                          int grid = 64);
BandCertificate band_inclusion_check(const Table& table, double epsilon, int grid = 64);

struct DoeblinResult {
  double b_hat = 0.0;              // min empirical N-step density over cells/starts
  std::int64_t unhit_cells = 0;    // across all probe starts
  double worst_coverage = 1.0;     // min over starts of hit-cell fraction
};

/// Empirical verification of the uniform N-step density lower bound: runs an
/// ensemble from every probe start and reports the minimum cell density.
DoeblinResult doeblin_lower_bound(const Table& table, const Kernel& kernel, int n_steps,
                                  const std::vector<PhasePoint>& probe_starts, int n_s,
                                  int n_theta, std::int64_t chains, std::uint64_t seed,
                                  std::int64_t budget = std::int64_t(1) << 33);

}  // namespace billiard

#pragma once

#include <cstdint>
#include <vector>

#include "billiard/chain.hpp"
#include "billiard/grid_measure.hpp"

namespace billiard {

/// Total-variation decay between the n-step laws of two starting points,
/// with a log-linear rate fit over the window where the signal sits above
/// the multinomial noise floor.
struct DecayFit {
  std::vector<std::int64_t> steps;
  std::vector<double> tv;
  std::vector<double> ci_half_width;  // bootstrap
  std::vector<double> noise_floor;    // split-half estimate per step
  double gamma_hat = 0.0;             // fitted rate, >= 0 on mixing chains
  double log_prefactor = 0.0;
  double r_squared = 0.0;
  std::int64_t fit_lo = 0, fit_hi = 0;  // fitted step window (inclusive)
};

struct TvDecayOptions {
  int n_s = 32;
  int n_theta = 32;
  int bootstrap_resamples = 200;
  std::int64_t transient_cut = 5;     // drop steps below this from the fit
  double floor_multiple = 3.0;        // drop TV below floor_multiple * floor
  std::int64_t budget = std::int64_t(1) << 33;
};

/// Paired ensembles (same seed, same chain indices) from x_a and x_b,
/// TV between their empirical laws at each step in n_list.
/// Throws Error when fewer than 3 points survive the fit window.
DecayFit tv_decay_experiment(const Table& table, const Kernel& kernel,
                             PhasePoint x_a, PhasePoint x_b,
                             const std::vector<std::int64_t>& n_list,
                             std::int64_t chains_per_point, std::uint64_t seed,
                             const TvDecayOptions& opt = {});

/// Time-average histogram of a single chain after burn-in.
GridMeasure invariant_measure_estimate(const Table& table, const Kernel& kernel,
                                       std::int64_t burn_in, std::int64_t n_samples,
                                       std::uint64_t seed, int n_s = 32,
                                       int n_theta = 32);

struct AbsorptionStats {
  std::vector<double> sorted_min_distances;  // per run, min over steps
  double median_min_theta = 0.0;
  /// Least-squares slope of mean log boundary distance vs step; NaN when the
  /// runs carry no recorded states.
  double log_drift = 0.0;

  double fraction_below(double threshold) const;
};

AbsorptionStats absorption_statistics(const std::vector<ChainRun>& runs);

}  // namespace billiard

#include "billiard/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>


namespace billiard {

namespace {

constexpr double kPi = std::numbers::pi;

struct LineFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  LineFit f;
  const double den = n * sxx - sx * sx;
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double mean_y = sy / n;
  for (std::size_t i = 0; i < n; ++i) {
    const double fit = f.intercept + f.slope * x[i];
    ss_res += (y[i] - fit) * (y[i] - fit);
    ss_tot += (y[i] - mean_y) * (y[i] - mean_y);
  }
  f.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

double tv_from_counts(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b,
                      double na, double nb) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += std::abs(a[i] / na - b[i] / nb);
  }
  return 0.5 * acc;
}

}  // namespace

DecayFit tv_decay_experiment(const Table& table, const Kernel& kernel, PhasePoint x_a,
                             PhasePoint x_b, const std::vector<std::int64_t>& n_list,
                             std::int64_t chains_per_point, std::uint64_t seed,
                             const TvDecayOptions& opt) {
  std::vector<std::int64_t> steps = n_list;
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
  if (steps.empty()) throw BadSpec("tv_decay_experiment: empty step list");

  ChainConfig cfg;
  cfg.table = &table;
  cfg.kernel = &kernel;
  cfg.seed = seed;
  cfg.n_chains = chains_per_point;
  cfg.n_steps = steps.back();
  cfg.budget = opt.budget;

  // Same seed and chain indexing for both starts: the ensembles are paired,
  // which lets coupled chains cancel instead of stacking independent noise.
  cfg.init = InitialCondition::at(x_a);
  const auto states_a = run_ensemble_checkpoints(cfg, steps);
  cfg.init = InitialCondition::at(x_b);
  const auto states_b = run_ensemble_checkpoints(cfg, steps);

  const int K = opt.n_s * opt.n_theta;
  const GridMeasure proto(opt.n_s, opt.n_theta, table.length());
  const double N = static_cast<double>(chains_per_point);

  DecayFit fit;
  fit.steps = steps;
  std::mt19937_64 boot_rng(RngStream::mix(seed ^ 0xB007B007B007B007ULL));

  for (std::size_t k = 0; k < steps.size(); ++k) {
    std::vector<std::int64_t> ca(K, 0), cb(K, 0);
    std::vector<std::int64_t> ca_even(K, 0), ca_odd(K, 0);
    std::vector<std::int32_t> cell_a(chains_per_point), cell_b(chains_per_point);
    for (std::int64_t c = 0; c < chains_per_point; ++c) {
      const int ia = proto.cell_of(states_a[k][c]);
      const int ib = proto.cell_of(states_b[k][c]);
      cell_a[c] = ia;
      cell_b[c] = ib;
      ++ca[ia];
      ++cb[ib];
      (c % 2 == 0 ? ca_even : ca_odd)[ia]++;
    }
    fit.tv.push_back(tv_from_counts(ca, cb, N, N));
    // Split-half noise floor, rescaled to full-ensemble sample size.
    fit.noise_floor.push_back(
        tv_from_counts(ca_even, ca_odd, std::ceil(N / 2), std::floor(N / 2)) /
        std::sqrt(2.0));

    // Paired bootstrap: resample chain indices, keeping each chain's
    // (cell_a, cell_b) pair together.
    double sum = 0.0, sum2 = 0.0;
    std::vector<std::int64_t> ra(K), rb(K);
    std::uniform_int_distribution<std::int64_t> pick(0, chains_per_point - 1);
    for (int rep = 0; rep < opt.bootstrap_resamples; ++rep) {
      std::fill(ra.begin(), ra.end(), 0);
      std::fill(rb.begin(), rb.end(), 0);
      for (std::int64_t c = 0; c < chains_per_point; ++c) {
        const std::int64_t j = pick(boot_rng);
        ++ra[cell_a[j]];
        ++rb[cell_b[j]];
      }
      const double t = tv_from_counts(ra, rb, N, N);
      sum += t;
      sum2 += t * t;
    }
    const double var = std::max(0.0, sum2 / opt.bootstrap_resamples -
                                         (sum / opt.bootstrap_resamples) *
                                             (sum / opt.bootstrap_resamples));
    fit.ci_half_width.push_back(1.96 * std::sqrt(var));
  }

  // Fit window: past the transient, above the noise floor.
  std::vector<double> xs, ys;
  std::int64_t lo = -1, hi = -1;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (steps[k] < opt.transient_cut) continue;
    if (fit.tv[k] <= opt.floor_multiple * fit.noise_floor[k]) continue;
    if (fit.tv[k] <= 0.0) continue;
    xs.push_back(static_cast<double>(steps[k]));
    ys.push_back(std::log(fit.tv[k]));
    if (lo < 0) lo = steps[k];
    hi = steps[k];
  }
  if (xs.size() < 3) {
    throw Error("tv_decay_experiment: fewer than 3 points above the noise floor; "
                "increase chains_per_point");
  }
  const LineFit lf = least_squares(xs, ys);
  fit.gamma_hat = -lf.slope;
  fit.log_prefactor = lf.intercept;
  fit.r_squared = lf.r2;
  fit.fit_lo = lo;
  fit.fit_hi = hi;
  return fit;
}

GridMeasure invariant_measure_estimate(const Table& table, const Kernel& kernel,
                                       std::int64_t burn_in, std::int64_t n_samples,
                                       std::uint64_t seed, int n_s, int n_theta) {
  GridMeasure g(n_s, n_theta, table.length());
  RngStream rng(seed, 0);
  rng.set_step(0);
  ChainConfig cfg;
  cfg.table = &table;
  cfg.kernel = &kernel;
  cfg.init = InitialCondition::nu();
  PhasePoint x = draw_initial(cfg, 0, rng);
  for (std::int64_t k = 1; k <= burn_in + n_samples; ++k) {
    rng.set_step(static_cast<std::uint64_t>(k));
    x = chain_step(table, kernel, x, rng);
    if (k > burn_in) g.add(x);
  }
  g.normalize();
  return g;
}

double AbsorptionStats::fraction_below(double threshold) const {
  const auto it = std::lower_bound(sorted_min_distances.begin(),
                                   sorted_min_distances.end(), threshold);
  return static_cast<double>(it - sorted_min_distances.begin()) /
         static_cast<double>(sorted_min_distances.size());
}

AbsorptionStats absorption_statistics(const std::vector<ChainRun>& runs) {
  if (runs.empty()) throw BadSpec("absorption_statistics: no runs");
  AbsorptionStats st;
  st.sorted_min_distances.reserve(runs.size());
  for (const auto& r : runs) st.sorted_min_distances.push_back(r.min_theta_distance);
  std::sort(st.sorted_min_distances.begin(), st.sorted_min_distances.end());
  const std::size_t n = st.sorted_min_distances.size();
  st.median_min_theta = (n % 2 == 1)
                            ? st.sorted_min_distances[n / 2]
                            : 0.5 * (st.sorted_min_distances[n / 2 - 1] +
                                     st.sorted_min_distances[n / 2]);

  bool have_states = !runs.empty();
  std::size_t len = runs[0].states.size();
  for (const auto& r : runs) {
    if (r.states.empty()) have_states = false;
    len = std::min(len, r.states.size());
  }
  if (!have_states || len < 2) {
    st.log_drift = std::numeric_limits<double>::quiet_NaN();
    return st;
  }
  std::vector<double> xs(len), ys(len);
  for (std::size_t k = 0; k < len; ++k) {
    double acc = 0.0;
    for (const auto& r : runs) {
      const double d =
          std::max(std::min(r.states[k].theta, kPi - r.states[k].theta), 1e-300);
      acc += std::log(d);
    }
    xs[k] = static_cast<double>(k);
    ys[k] = acc / runs.size();
  }
  st.log_drift = least_squares(xs, ys).slope;
  return st;
}

}  // namespace billiard

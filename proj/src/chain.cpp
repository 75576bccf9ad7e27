#include "billiard/chain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "billiard/parallel.hpp"
#include "billiard/tolerances.hpp"

namespace billiard {

namespace {
constexpr double kPi = std::numbers::pi;

double clamp_theta(double theta) {
  if (theta < 0.0) {
    if (theta < -Tolerances::theta_rounding) {
      throw Error("theta left [0, pi] beyond rounding tolerance");
    }
    return 0.0;
  }
  if (theta > kPi) {
    if (theta > kPi + Tolerances::theta_rounding) {
      throw Error("theta left [0, pi] beyond rounding tolerance");
    }
    return kPi;
  }
  return theta;
}
}  // namespace

InitialCondition InitialCondition::list(std::vector<PhasePoint> pts) {
  InitialCondition ic;
  ic.law = Law::list;
  ic.points = std::move(pts);
  return ic;
}

InitialCondition InitialCondition::parse(const std::string& text) {
  if (text == "uniform") return uniform();
  if (text == "nu") return nu();
  std::stringstream ss(text);
  std::string a, b;
  if (std::getline(ss, a, ',') && std::getline(ss, b)) {
    return at({std::stod(a), std::stod(b)});
  }
  throw BadSpec("initial condition must be \"s,theta\", \"uniform\" or \"nu\"");
}

void ChainConfig::validate() const {
  if (!table || !kernel) throw BadSpec("chain config needs a table and a kernel");
  if (n_steps < 0 || n_chains < 1) throw BadSpec("n_steps >= 0 and n_chains >= 1");
  if (init.law == InitialCondition::Law::list && init.points.empty()) {
    throw BadSpec("initial point list is empty");
  }
  const std::int64_t work = n_chains * std::max<std::int64_t>(n_steps, 1);
  if (work > budget) throw BudgetExceeded("n_steps * n_chains exceeds budget");
}

PhasePoint chain_step(const Table& table, const Kernel& kernel, PhasePoint x,
                      RngStream& rng) {
  const StepResult r = map_step(table, x);
  const double theta = clamp_theta(kernel.sample(r.next.theta, rng));
  return {r.next.s, theta};
}

PhasePoint draw_initial(const ChainConfig& cfg, std::int64_t chain_index,
                        RngStream& rng) {
  switch (cfg.init.law) {
    case InitialCondition::Law::point:
      return cfg.init.point;
    case InitialCondition::Law::list:
      return cfg.init.points[chain_index % cfg.init.points.size()];
    case InitialCondition::Law::uniform: {
      const double s = rng.uniform01() * cfg.table->length();
      const double theta = rng.uniform01() * kPi;
      return {s, theta};
    }
    case InitialCondition::Law::nu: {
      // density sin(theta) ds dtheta / (2 |Gamma|)
      const double s = rng.uniform01() * cfg.table->length();
      const double theta = std::acos(1.0 - 2.0 * rng.uniform01());
      return {s, theta};
    }
  }
  return cfg.init.point;
}

namespace {

template <typename Visit>
void run_one(const ChainConfig& cfg, std::int64_t chain_index, const Visit& visit) {
  RngStream rng(cfg.seed, static_cast<std::uint64_t>(chain_index));
  rng.set_step(0);
  PhasePoint x = draw_initial(cfg, chain_index, rng);
  visit(0, x, 0.0);
  for (std::int64_t k = 1; k <= cfg.n_steps; ++k) {
    rng.set_step(static_cast<std::uint64_t>(k));
    const StepResult r = map_step(*cfg.table, x);
    x = {r.next.s, clamp_theta(cfg.kernel->sample(r.next.theta, rng))};
    visit(k, x, r.chord);
  }
}

}  // namespace

ChainRun run_chain(const ChainConfig& cfg, std::int64_t chain_index) {
  cfg.validate();
  ChainRun run;
  run.min_theta_distance = kPi / 2.0;
  if (cfg.record_states) {
    run.states.reserve(cfg.n_steps + 1);
    run.chord_lengths.reserve(cfg.n_steps);
  }
  run_one(cfg, chain_index, [&](std::int64_t k, PhasePoint x, double chord) {
    if (cfg.record_states) {
      run.states.push_back(x);
      if (k > 0) run.chord_lengths.push_back(chord);
    }
    run.min_theta_distance = std::min(run.min_theta_distance, std::min(x.theta, kPi - x.theta));
    run.final = x;
    run.steps = k;
  });
  return run;
}

std::vector<PhasePoint> run_ensemble(const ChainConfig& cfg) {
  cfg.validate();
  std::vector<PhasePoint> finals(cfg.n_chains);
  parallel_for(cfg.n_chains, [&](std::int64_t c) {
    PhasePoint last;
    run_one(cfg, c, [&](std::int64_t, PhasePoint x, double) { last = x; });
    finals[c] = last;
  });
  return finals;
}

std::vector<std::vector<PhasePoint>> run_ensemble_checkpoints(
    const ChainConfig& cfg, const std::vector<std::int64_t>& checkpoints) {
  cfg.validate();
  std::vector<std::vector<PhasePoint>> out(checkpoints.size());
  for (auto& v : out) v.resize(cfg.n_chains);
  parallel_for(cfg.n_chains, [&](std::int64_t c) {
    std::size_t next = 0;
    run_one(cfg, c, [&](std::int64_t k, PhasePoint x, double) {
      while (next < checkpoints.size() && checkpoints[next] == k) {
        out[next][c] = x;
        ++next;
      }
    });
  });
  return out;
}

}  // namespace billiard

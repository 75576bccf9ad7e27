#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "billiard/kernel.hpp"
#include "billiard/map.hpp"
#include "billiard/rng.hpp"

namespace billiard {

/// Starting law for an ensemble: a fixed point, an explicit list (cycled by
/// chain index), or one of the named laws.
struct InitialCondition {
  enum class Law { point, list, uniform, nu };
  Law law = Law::point;
  PhasePoint point;
  std::vector<PhasePoint> points;

  static InitialCondition at(PhasePoint x) { return {Law::point, x, {}}; }
  static InitialCondition list(std::vector<PhasePoint> pts);
  static InitialCondition uniform() { return {Law::uniform, {}, {}}; }
  static InitialCondition nu() { return {Law::nu, {}, {}}; }
  /// "s,theta" | "uniform" | "nu"
  static InitialCondition parse(const std::string& text);
};

struct ChainConfig {
  const Table* table = nullptr;
  const Kernel* kernel = nullptr;
  std::uint64_t seed = 0;
  std::int64_t n_steps = 0;
  std::int64_t n_chains = 1;
  InitialCondition init;
  bool record_states = false;
  std::int64_t budget = std::int64_t(1) << 33;

  void validate() const;  // throws BudgetExceeded / BadSpec
};

struct ChainRun {
  std::vector<PhasePoint> states;  // n_steps + 1 entries when recorded
  std::vector<double> chord_lengths;
  double min_theta_distance = 0.0;  // min over steps of min(theta, pi - theta)
  std::int64_t steps = 0;
  PhasePoint final;
};

/// One transition: deterministic bounce, then an angle draw from the kernel
/// at the image angle. The caller positions the stream (set_step).
PhasePoint chain_step(const Table& table, const Kernel& kernel, PhasePoint x,
                      RngStream& rng);

PhasePoint draw_initial(const ChainConfig& cfg, std::int64_t chain_index,
                        RngStream& rng);

ChainRun run_chain(const ChainConfig& cfg, std::int64_t chain_index = 0);

/// Final states of every chain, merged in chain-index order; chains are
/// distributed over the worker pool.
std::vector<PhasePoint> run_ensemble(const ChainConfig& cfg);

/// States of every chain at each requested step (sorted checkpoint list);
/// result[k][c] is chain c at step checkpoints[k].
std::vector<std::vector<PhasePoint>> run_ensemble_checkpoints(
    const ChainConfig& cfg, const std::vector<std::int64_t>& checkpoints);

}  // namespace billiard

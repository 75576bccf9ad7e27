#pragma once

#include <stdexcept>
#include <string>

namespace billiard {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A table spec parameter violates its constraints.
struct BadSpec : Error {
  using Error::Error;
};

/// The boundary curve has negative curvature beyond tolerance.
struct NonConvex : Error {
  using Error::Error;
};

/// The collision root finder failed to bracket; signals a broken table.
struct SolverFailed : Error {
  using Error::Error;
};

/// Differential requested at a point too close to theta = 0 or pi.
struct BoundaryPoint : Error {
  using Error::Error;
};

/// n_steps * n_chains exceeds the configured budget.
struct BudgetExceeded : Error {
  using Error::Error;
};

}  // namespace billiard

#pragma once

#include <string>
#include <vector>

#include "rimeopt/core.hpp"

namespace rimeopt::constrained {

/// A constrained minimization problem: raw objective, inequality constraints
/// g_i(x) <= 0 and equality constraints h_j(x) = 0, plus a stored feasible
/// point used as a smoke-test witness.
struct ConstrainedProblem {
  std::string name;
  SearchSpace bounds;
  Objective objective;
  std::vector<Objective> inequality;
  std::vector<Objective> equality;
  Vec feasible_witness;

  int dim() const { return bounds.dim(); }
};

inline constexpr double kDefaultPenaltyFactor = 1e10;
inline constexpr double kDefaultEqTolerance = 1e-4;

/// Static-penalty transform:
///   F(x) = f(x) + factor * [sum max(0, g_i)^2 + sum max(0, |h_j| - eq_tol)^2]
/// Feasible points keep their raw objective exactly.
Objective penalized(const ConstrainedProblem& problem, double factor = kDefaultPenaltyFactor,
                    double eq_tol = kDefaultEqTolerance);

/// Largest constraint violation at x: max over max(0, g_i) and
/// max(0, |h_j| - eq_tol). Zero iff x is feasible (within the tolerance band).
double max_violation(const ConstrainedProblem& problem, const Vec& x,
                     double eq_tol = kDefaultEqTolerance);

/// The five canonical problems with standard-literature formulations:
/// tension/compression spring, pressure vessel, three-bar truss, welded
/// beam, gear train. User-supplied ConstrainedProblem values cover anything
/// beyond these.
std::vector<ConstrainedProblem> problem_registry();

/// Registry lookup by name; throws ConfigError when absent.
ConstrainedProblem problem_by_name(const std::string& name);

}  // namespace rimeopt::constrained

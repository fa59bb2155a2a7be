#pragma once

#include <cstdint>
#include <vector>

#include "rimeopt/core.hpp"

namespace rimeopt::rime {

/// Fitness scaling feeding the puncture probability.
///   unit:    Fit_i / ||Fit||_2, the original reference-code behavior
///            (MATLAB normr). Keeps per-agent rates clustered near
///            1/sqrt(NP) once fitness values converge, which preserves
///            population spread late in a run. Negative fitness yields a
///            negative rate, i.e. no puncture for those agents.
///   min_max: (Fit_i - min) / (max - min), the normalize_fitness scaling.
/// Both degenerate to 0.5 everywhere when the scale collapses.
enum class PunctureNorm { unit, min_max };

struct RimeParams {
  /// Step count of the beta staircase.
  int w = 5;
  int np = 30;
  std::uint64_t fes_max = 0;
  PunctureNorm puncture_norm = PunctureNorm::unit;

  void validate() const;
};

/// Attachment coefficient E = sqrt(used/max), non-decreasing over a run.
double coeff_e(const Budget& budget);

/// theta = used * pi / (10 * max), in [0, pi/10].
double coeff_theta(const Budget& budget);

/// beta = 1 - round(w * used/max)/w, a non-increasing staircase over
/// {1, 1-1/w, ..., 0}. round() is half-away-from-zero (std::round), which
/// the per-operation tests pin down.
double coeff_beta(const Budget& budget, int w);

/// Soft-rime coordinate move, before clamping:
///   best_j + alpha * cos(theta) * beta * (rand01 * (ub_j - lb_j) + lb_j)
double soft_rime_coordinate(double best_j, double alpha, double cos_theta, double beta,
                            double rand01, double lb_j, double ub_j);

/// Soft-rime move for one agent's proposal, in place. Draw order: alpha ~
/// U(-1,1) once, then per dimension r1 ~ U[0,1); when r1 < e one further
/// U[0,1) draw feeds the coordinate move, otherwise the coordinate keeps its
/// current value. The result is clamped to bounds. Shared with the MRIME
/// orchestrator, whose all-strategies-off variant must consume the identical
/// draw sequence.
void soft_rime_agent(Vec& proposal, const Vec& best, const SearchSpace& space, double e,
                     double cos_theta, double beta, RngStream& rng);

/// Soft-rime proposals for the whole population (soft_rime_agent per agent,
/// coefficients taken from the budget).
std::vector<Vec> soft_rime_step(const Population& population, const SearchSpace& space,
                                const Budget& budget, int w, RngStream& rng);

/// Min-max normalized fitness in [0,1]; an all-equal population maps to 0.5
/// everywhere. Throws NumericError on non-finite fitness.
std::vector<double> normalize_fitness(const Population& population);

/// Per-agent puncture probability under the chosen scaling.
std::vector<double> puncture_rates(const Population& population, PunctureNorm norm);

/// Hard-rime puncture: per agent and dimension, one fresh U[0,1) draw; when
/// it falls below that agent's puncture rate the coordinate is replaced by
/// the best agent's. Draws are consumed for every (agent, dimension) pair
/// so the sequence is independent of the data.
void hard_rime_puncture(const Population& population, std::vector<Vec>& proposed, RngStream& rng,
                        PunctureNorm norm = PunctureNorm::unit);

/// Positive greedy selection: offspring i replaces parent i only on strict
/// fitness improvement (count resets to 0); otherwise the parent stays and
/// its count increments. Refreshes best_index.
void greedy_select(Population& parents, const Population& offspring);

/// Wrap proposals into an unevaluated population ready for evaluate().
Population make_offspring(const std::vector<Vec>& proposals);

/// Basic RIME: soft-rime step, puncture, evaluate, greedy selection until the
/// budget cannot afford another full generation. The run seed spawns one
/// sub-stream for initialization (salt 0) and one per generation (salt 1+g).
RunRecord run_rime(const Objective& objective, const SearchSpace& space,
                   const RimeParams& params, std::uint64_t seed);

}  // namespace rimeopt::rime

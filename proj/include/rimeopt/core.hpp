#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace rimeopt {

using Vec = Eigen::VectorXd;

/// Raised for invalid problem/algorithm configuration (bad bounds, sizes, ids).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a numeric routine cannot proceed (non-finite input, failed
/// factorization after all retries).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Box-constrained search space: dim, per-dimension lower/upper bounds.
struct SearchSpace {
  Vec lower;
  Vec upper;

  int dim() const { return static_cast<int>(lower.size()); }

  /// Throws ConfigError unless lower/upper have equal positive length and
  /// lower[j] < upper[j] for every j.
  void validate() const;

  /// Componentwise clamp into [lower, upper].
  Vec clamp(Vec x) const;

  static SearchSpace uniform_box(int dim, double lo, double hi);
};

/// Deterministic random stream. One stream per run; sub-streams are split
/// off by index so the draw sequence of a generation does not depend on how
/// many draws earlier generations consumed.
///
/// All randomness in this library flows through this class with a fixed,
/// documented draw scheme:
///   - uniform01(): one mt19937_64 output, top 53 bits, in [0, 1)
///   - normal():    Box-Muller, exactly two uniform01() draws per call
///                  (no caching of the second deviate)
///   - index(n):    one mt19937_64 output, multiply-shift reduction
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  /// Uniform in [0, 1).
  double uniform01();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);
  /// Standard normal deviate.
  double normal();
  /// Uniform index in [0, n). n must be >= 1.
  std::size_t index(std::size_t n);

  /// Derive an independent child stream from this stream's seed and a salt.
  /// Depends only on (seed, salt), never on draws consumed so far.
  RngStream split(std::uint64_t salt) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t next_u64();

  std::uint64_t seed_;
  std::uint64_t state_;
};

/// splitmix64 mix function; also used for campaign seed derivation.
std::uint64_t splitmix64(std::uint64_t x);

/// One candidate solution. fitness is empty until evaluated; count is the
/// consecutive-failure counter driving the stagnation trigger.
struct Agent {
  Vec position;
  std::optional<double> fitness;
  std::int64_t count = 0;

  bool evaluated() const { return fitness.has_value(); }
};

/// Ordered population plus the index of its current best (minimization).
struct Population {
  std::vector<Agent> agents;
  std::size_t best_index = 0;

  std::size_t size() const { return agents.size(); }
  const Agent& best() const { return agents[best_index]; }

  /// Recompute best_index as the argmin of fitness (first index on ties).
  /// Requires every agent evaluated.
  void refresh_best();
};

/// Objective evaluation budget. used increases by exactly one per call.
struct Budget {
  std::uint64_t used = 0;
  std::uint64_t max = 0;

  std::uint64_t remaining() const { return max - used; }
};

using Objective = std::function<double(const Vec&)>;

enum class EvalOutcome { done, budget_exhausted };

/// Convergence log of a single seeded run; the unit of all statistics.
struct RunRecord {
  std::string variant;
  std::string instance_id;
  std::uint64_t seed = 0;
  /// (evals_used, best-so-far fitness), one entry after the initial
  /// evaluation and one per completed generation.
  std::vector<std::pair<std::uint64_t, double>> history;
  double final_best = 0.0;
  Vec final_position;
  /// Per-generation population diversity (MRIME runs only).
  std::vector<double> nvol_history;
  std::uint64_t spdm_triggers = 0;
  bool spdm_skipped_small_population = false;
  double wall_time_s = 0.0;
};

/// Uniform random positions within bounds; fitness unevaluated, counts zero.
/// Draw order: agent by agent, dimension by dimension.
Population initialize_population(const SearchSpace& space, int np, RngStream& rng);

/// Evaluate every unevaluated agent, charging one budget unit each.
/// All-or-nothing: if the unevaluated count exceeds the remaining budget,
/// evaluates none and returns budget_exhausted so the caller can terminate
/// cleanly. Refreshes best_index on success.
EvalOutcome evaluate(const Objective& objective, Population& population, Budget& budget);

}  // namespace rimeopt

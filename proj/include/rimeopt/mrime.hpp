#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rimeopt/core.hpp"
#include "rimeopt/linalg.hpp"
#include "rimeopt/rime.hpp"

namespace rimeopt::mrime {

/// FIFO store of elite (position, fitness) pairs feeding the Gaussian model.
class DominantArchive {
 public:
  struct Entry {
    Vec position;
    double fitness;
  };

  explicit DominantArchive(std::size_t capacity);

  /// Append one entry, evicting the oldest when over capacity.
  void push(Vec position, double fitness);

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  const std::deque<Entry>& entries() const { return entries_; }

  /// Positions sorted best-fitness-first (ties keep insertion order), the
  /// ordering the rank weights expect.
  std::vector<Vec> members_best_first() const;

 private:
  std::size_t capacity_;
  std::deque<Entry> entries_;
};

/// Which of the three improvement strategies are active (Y/N ablation grid).
struct StrategyFlags {
  bool gcls = false;
  bool abs = false;
  bool spdm = false;

  bool any() const { return gcls || abs || spdm; }
};

struct MrimeParams {
  rime::RimeParams rime;
  /// 0 means "population size".
  std::size_t archive_capacity = 0;
  /// 0 means "half the population, rounded up".
  std::size_t group_size = 0;
  double nvol_threshold = 0.01;
  /// Stagnation fires when an agent's count exceeds count_factor * dim.
  double count_factor = 2.0;
  linalg::WeightMode weight_mode = linalg::WeightMode::corrected;

  std::size_t resolved_archive_capacity() const;
  std::size_t resolved_group_size() const;
  void validate() const;
};

/// Roulette domain selection: anchor drawn fitness-proportionally over the
/// inverted min-max-normalized fitness (one uniform draw; all-equal fitness
/// degenerates to a uniform pick), then the (group_size - 1) agents nearest
/// the anchor by Euclidean distance join it. Returns population indices
/// sorted best-fitness-first.
std::vector<std::size_t> select_dominant_group(const Population& population,
                                               std::size_t group_size, RngStream& rng);

/// Push the selected members into the archive in the given order.
void archive_update(DominantArchive& archive, const Population& population,
                    std::span<const std::size_t> member_indices);

/// Covariance-learning proposal: mvn_sample(model) + u * (mean - x_i),
/// u ~ U[0,1), clamped to bounds. Draw order: the sample's normals, then u.
Vec gcls_position(const Agent& agent, const linalg::GaussianModel& model,
                  const SearchSpace& space, RngStream& rng);

/// Branch of the exploration switch for a given per-agent draw.
inline bool soft_rime_branch(double r1, double e) { return r1 < e; }

/// ABS-aware puncture pass over the proposals. Per agent: r1 comes from
/// r1_per_agent when provided (the exploration-switch draw), otherwise one
/// fresh uniform; then per dimension one fresh uniform u, and when
/// u < rate(Fit_i) the coordinate becomes the best agent's (late phase,
/// r1 < e) or the best/model-mean midpoint (early phase, r1 >= e).
void abs_update(const Population& population, std::vector<Vec>& proposed, const Vec& model_mean,
                double e, RngStream& rng,
                rime::PunctureNorm norm = rime::PunctureNorm::unit,
                std::span<const double> r1_per_agent = {});

/// Normalized population-volume diversity, computed in log space:
/// nVOL = exp(0.5 * (log Vpop - log Vlim)) with Vpop/Vlim the square roots of
/// the products of per-dimension population extents over 2 and search-range
/// extents. Zero extent in any dimension gives 0.
double diversity_nvol(const SearchSpace& space, const Population& population);

/// Two distinct partner indices != agent_index, uniform over the rest.
std::pair<std::size_t, std::size_t> pick_two_partners(std::size_t agent_index, std::size_t np,
                                                      RngStream& rng);

/// Stagnation restart proposal: mvn_sample(model) + u1*(x_a - x_i)
/// + u2*(x_b - x_i) with distinct a, b != i drawn uniformly, clamped.
/// Draw order: a, b, the sample's normals, u1, u2.
Vec spdm_position(std::size_t agent_index, const Population& population,
                  const linalg::GaussianModel& model, const SearchSpace& space, RngStream& rng);

/// True when diversity has collapsed below the threshold AND the agent's
/// consecutive-failure count exceeds count_factor * dim.
bool stagnation_triggered(const SearchSpace& space, const Population& population,
                          const Agent& agent, const MrimeParams& params);

/// Full MRIME-CD orchestrator; disabled strategies fall back to the basic
/// RIME mechanisms, so flags {false,false,false} reproduces run_rime
/// bit-exactly on the same seed.
RunRecord run_mrime_cd(const Objective& objective, const SearchSpace& space,
                       const MrimeParams& params, StrategyFlags flags, std::uint64_t seed);

/// A named, configured optimizer from the ablation grid (plus basic RIME).
struct Variant {
  std::string name;
  StrategyFlags flags;

  RunRecord run(const Objective& objective, const SearchSpace& space, const MrimeParams& params,
                std::uint64_t seed) const {
    return run_mrime_cd(objective, space, params, flags, seed);
  }
};

/// Variant for an explicit flag combination (names the 8 canonical ones).
Variant make_variant(StrategyFlags flags);

/// Variant by canonical name: RIME, RIME-G, RIME-A, RIME-S, RIME-GA,
/// RIME-GS, RIME-AS, MRIME-CD. Throws ConfigError for unknown names.
Variant make_variant(const std::string& name);

/// All eight canonical variants in ablation-table order.
std::vector<Variant> canonical_variants();

}  // namespace rimeopt::mrime

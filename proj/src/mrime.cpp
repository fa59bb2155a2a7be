#include "rimeopt/mrime.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rimeopt::mrime {

DominantArchive::DominantArchive(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) {
    throw ConfigError("dominant archive: capacity must be at least 1");
  }
}

void DominantArchive::push(Vec position, double fitness) {
  entries_.push_back({std::move(position), fitness});
  while (entries_.size() > capacity_) {
    entries_.pop_front();
  }
}

std::vector<Vec> DominantArchive::members_best_first() const {
  std::vector<std::size_t> order(entries_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return entries_[a].fitness < entries_[b].fitness;
  });
  std::vector<Vec> members;
  members.reserve(order.size());
  for (std::size_t i : order) {
    members.push_back(entries_[i].position);
  }
  return members;
}

std::size_t MrimeParams::resolved_archive_capacity() const {
  return archive_capacity != 0 ? archive_capacity : static_cast<std::size_t>(rime.np);
}

std::size_t MrimeParams::resolved_group_size() const {
  return group_size != 0 ? group_size : (static_cast<std::size_t>(rime.np) + 1) / 2;
}

void MrimeParams::validate() const {
  rime.validate();
  if (group_size > static_cast<std::size_t>(rime.np)) {
    throw ConfigError("mrime: group_size exceeds population size");
  }
  if (!(nvol_threshold > 0.0)) {
    throw ConfigError("mrime: nvol_threshold must be positive");
  }
  if (count_factor < 0.0) {
    throw ConfigError("mrime: count_factor must be non-negative");
  }
}

std::vector<std::size_t> select_dominant_group(const Population& population,
                                               std::size_t group_size, RngStream& rng) {
  const std::size_t np = population.size();
  if (group_size < 1 || group_size > np) {
    throw ConfigError("select_dominant_group: group_size out of range");
  }

  // Roulette anchor over inverted normalized fitness; the all-equal case
  // normalizes to 0.5 everywhere, i.e. a uniform pick.
  const std::vector<double> nrom = rime::normalize_fitness(population);
  double total = 0.0;
  for (double n : nrom) total += 1.0 - n;
  const double threshold = rng.uniform01() * total;
  std::size_t anchor = np - 1;
  double cum = 0.0;
  for (std::size_t i = 0; i < np; ++i) {
    cum += 1.0 - nrom[i];
    if (threshold < cum) {
      anchor = i;
      break;
    }
  }

  // Anchor plus its group_size - 1 nearest agents (anchor distance is 0, so
  // it always survives); ties broken by index.
  std::vector<std::size_t> order(np);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> dist(np);
  for (std::size_t i = 0; i < np; ++i) {
    dist[i] = (population.agents[i].position - population.agents[anchor].position).norm();
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
  order.resize(group_size);

  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return *population.agents[a].fitness < *population.agents[b].fitness;
  });
  return order;
}

void archive_update(DominantArchive& archive, const Population& population,
                    std::span<const std::size_t> member_indices) {
  for (std::size_t i : member_indices) {
    archive.push(population.agents[i].position, *population.agents[i].fitness);
  }
}

Vec gcls_position(const Agent& agent, const linalg::GaussianModel& model,
                  const SearchSpace& space, RngStream& rng) {
  Vec sample = linalg::mvn_sample(model, rng);
  const double u = rng.uniform01();
  return space.clamp(sample + u * (model.mean - agent.position));
}

void abs_update(const Population& population, std::vector<Vec>& proposed, const Vec& model_mean,
                double e, RngStream& rng, rime::PunctureNorm norm,
                std::span<const double> r1_per_agent) {
  const std::vector<double> nrom = rime::puncture_rates(population, norm);
  const Vec& best = population.best().position;
  for (std::size_t i = 0; i < proposed.size(); ++i) {
    const double r1 = r1_per_agent.empty() ? rng.uniform01() : r1_per_agent[i];
    const bool early_phase = r1 >= e;
    for (Eigen::Index j = 0; j < proposed[i].size(); ++j) {
      if (rng.uniform01() < nrom[i]) {
        proposed[i][j] = early_phase ? 0.5 * (best[j] + model_mean[j]) : best[j];
      }
    }
  }
}

double diversity_nvol(const SearchSpace& space, const Population& population) {
  double log_vpop = 0.0;
  double log_vlim = 0.0;
  for (int j = 0; j < space.dim(); ++j) {
    double lo = population.agents[0].position[j];
    double hi = lo;
    for (const Agent& agent : population.agents) {
      lo = std::min(lo, agent.position[j]);
      hi = std::max(hi, agent.position[j]);
    }
    if (hi <= lo) {
      return 0.0;
    }
    log_vpop += 0.5 * std::log((hi - lo) / 2.0);
    log_vlim += 0.5 * std::log(space.upper[j] - space.lower[j]);
  }
  return std::exp(0.5 * (log_vpop - log_vlim));
}

std::pair<std::size_t, std::size_t> pick_two_partners(std::size_t agent_index, std::size_t np,
                                                      RngStream& rng) {
  if (np < 3) {
    throw ConfigError("pick_two_partners: needs a population of at least 3");
  }
  std::size_t a = rng.index(np - 1);
  if (a >= agent_index) ++a;
  std::size_t b = rng.index(np - 2);
  for (std::size_t excluded : {std::min(agent_index, a), std::max(agent_index, a)}) {
    if (b >= excluded) ++b;
  }
  return {a, b};
}

Vec spdm_position(std::size_t agent_index, const Population& population,
                  const linalg::GaussianModel& model, const SearchSpace& space, RngStream& rng) {
  const auto [a, b] = pick_two_partners(agent_index, population.size(), rng);
  Vec sample = linalg::mvn_sample(model, rng);
  const double u1 = rng.uniform01();
  const double u2 = rng.uniform01();
  const Vec& xi = population.agents[agent_index].position;
  return space.clamp(sample + u1 * (population.agents[a].position - xi) +
                     u2 * (population.agents[b].position - xi));
}

bool stagnation_triggered(const SearchSpace& space, const Population& population,
                          const Agent& agent, const MrimeParams& params) {
  return diversity_nvol(space, population) < params.nvol_threshold &&
         static_cast<double>(agent.count) > params.count_factor * space.dim();
}

RunRecord run_mrime_cd(const Objective& objective, const SearchSpace& space,
                       const MrimeParams& params, StrategyFlags flags, std::uint64_t seed) {
  space.validate();
  params.validate();
  const int np = params.rime.np;
  const auto np_u = static_cast<std::uint64_t>(np);
  const std::size_t group_size = params.resolved_group_size();

  const RngStream root(seed);
  RngStream init_rng = root.split(0);
  Population pop = initialize_population(space, np, init_rng);
  Budget budget{0, params.rime.fes_max};
  evaluate(objective, pop, budget);

  RunRecord record;
  record.seed = seed;
  record.history.emplace_back(budget.used, *pop.best().fitness);

  const bool need_model = flags.any();
  const bool spdm_active = flags.spdm && np >= 3;
  if (flags.spdm && np < 3) {
    record.spdm_skipped_small_population = true;
  }

  DominantArchive archive(params.resolved_archive_capacity());
  if (need_model) {
    // Seed the archive with the initial population's best group_size agents.
    std::vector<std::size_t> order(pop.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return *pop.agents[a].fitness < *pop.agents[b].fitness;
    });
    order.resize(group_size);
    archive_update(archive, pop, order);
  }

  for (std::uint64_t g = 0; budget.remaining() >= np_u; ++g) {
    RngStream gen_rng = root.split(1 + g);
    const double e = rime::coeff_e(budget);
    const double cos_theta = std::cos(rime::coeff_theta(budget));
    const double beta = rime::coeff_beta(budget, params.rime.w);

    std::optional<linalg::GaussianModel> model;
    if (need_model) {
      const std::vector<std::size_t> group = select_dominant_group(pop, group_size, gen_rng);
      archive_update(archive, pop, group);
      const std::vector<Vec> members = archive.members_best_first();
      model = linalg::GaussianModel::fit(members, params.weight_mode);
    }

    // Proposal phase: per agent either the soft-rime move or, on the GCLS
    // branch of the exploration switch, a covariance-learning sample.
    const Vec best = pop.best().position;
    std::vector<Vec> proposals;
    proposals.reserve(pop.size());
    std::vector<double> r1s(pop.size(), -1.0);
    for (std::size_t i = 0; i < pop.size(); ++i) {
      Vec p = pop.agents[i].position;
      if (flags.gcls) {
        r1s[i] = gen_rng.uniform01();
        if (soft_rime_branch(r1s[i], e)) {
          rime::soft_rime_agent(p, best, space, e, cos_theta, beta, gen_rng);
        } else {
          p = gcls_position(pop.agents[i], *model, space, gen_rng);
        }
      } else {
        rime::soft_rime_agent(p, best, space, e, cos_theta, beta, gen_rng);
      }
      proposals.push_back(std::move(p));
    }

    // Puncture phase: ABS midpoint in the early phase, classic otherwise.
    if (flags.abs) {
      abs_update(pop, proposals, model->mean, e, gen_rng, params.rime.puncture_norm,
                 flags.gcls ? std::span<const double>(r1s) : std::span<const double>());
    } else {
      rime::hard_rime_puncture(pop, proposals, gen_rng, params.rime.puncture_norm);
    }

    Population offspring = rime::make_offspring(proposals);
    if (evaluate(objective, offspring, budget) == EvalOutcome::budget_exhausted) {
      break;  // unreachable under the loop guard, kept as a safety net
    }
    rime::greedy_select(pop, offspring);

    // Stagnation restarts; nVOL is frozen once per generation.
    const double nvol = diversity_nvol(space, pop);
    record.nvol_history.push_back(nvol);
    if (spdm_active && nvol < params.nvol_threshold) {
      const double count_limit = params.count_factor * space.dim();
      for (std::size_t i = 0; i < pop.size(); ++i) {
        if (static_cast<double>(pop.agents[i].count) <= count_limit) continue;
        if (budget.remaining() < 1) break;
        Vec proposal = spdm_position(i, pop, *model, space, gen_rng);
        const double f = objective(proposal);
        ++budget.used;
        ++record.spdm_triggers;
        if (f < *pop.agents[i].fitness) {
          pop.agents[i].position = std::move(proposal);
          pop.agents[i].fitness = f;
          pop.agents[i].count = 0;
          if (f < *pop.best().fitness) {
            pop.best_index = i;
          }
        }
      }
    }

    record.history.emplace_back(budget.used, *pop.best().fitness);
  }

  record.final_best = *pop.best().fitness;
  record.final_position = pop.best().position;
  return record;
}

namespace {

const std::vector<std::pair<std::string, StrategyFlags>>& variant_table() {
  static const std::vector<std::pair<std::string, StrategyFlags>> table = {
      {"RIME", {false, false, false}},   {"RIME-G", {true, false, false}},
      {"RIME-A", {false, true, false}},  {"RIME-S", {false, false, true}},
      {"RIME-GA", {true, true, false}},  {"RIME-GS", {true, false, true}},
      {"RIME-AS", {false, true, true}},  {"MRIME-CD", {true, true, true}},
  };
  return table;
}

}  // namespace

Variant make_variant(StrategyFlags flags) {
  for (const auto& [name, f] : variant_table()) {
    if (f.gcls == flags.gcls && f.abs == flags.abs && f.spdm == flags.spdm) {
      return {name, flags};
    }
  }
  return {"custom", flags};  // unreachable: 8 rows cover all combinations
}

Variant make_variant(const std::string& name) {
  for (const auto& [canonical, flags] : variant_table()) {
    if (canonical == name) {
      return {canonical, flags};
    }
  }
  throw ConfigError("unknown variant name: " + name);
}

std::vector<Variant> canonical_variants() {
  std::vector<Variant> variants;
  for (const auto& [name, flags] : variant_table()) {
    variants.push_back({name, flags});
  }
  return variants;
}

}  // namespace rimeopt::mrime

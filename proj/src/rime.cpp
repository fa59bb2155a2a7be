#include "rimeopt/rime.hpp"

#include <cmath>
#include <limits>

namespace rimeopt::rime {

void RimeParams::validate() const {
  if (w < 1) throw ConfigError("rime: w must be at least 1");
  if (np < 2) throw ConfigError("rime: population size must be at least 2");
  if (fes_max < static_cast<std::uint64_t>(np)) {
    throw ConfigError("rime: budget cannot afford the initial evaluation");
  }
}

double coeff_e(const Budget& budget) {
  return std::sqrt(static_cast<double>(budget.used) / static_cast<double>(budget.max));
}

double coeff_theta(const Budget& budget) {
  return static_cast<double>(budget.used) * M_PI / (10.0 * static_cast<double>(budget.max));
}

double coeff_beta(const Budget& budget, int w) {
  const double g =
      static_cast<double>(w) * static_cast<double>(budget.used) / static_cast<double>(budget.max);
  return 1.0 - std::round(g) / static_cast<double>(w);
}

double soft_rime_coordinate(double best_j, double alpha, double cos_theta, double beta,
                            double rand01, double lb_j, double ub_j) {
  return best_j + alpha * cos_theta * beta * (rand01 * (ub_j - lb_j) + lb_j);
}

void soft_rime_agent(Vec& proposal, const Vec& best, const SearchSpace& space, double e,
                     double cos_theta, double beta, RngStream& rng) {
  const double alpha = rng.uniform(-1.0, 1.0);
  for (int j = 0; j < space.dim(); ++j) {
    const double r1 = rng.uniform01();
    if (r1 < e) {
      const double rand01 = rng.uniform01();
      proposal[j] = soft_rime_coordinate(best[j], alpha, cos_theta, beta, rand01,
                                         space.lower[j], space.upper[j]);
    }
  }
  proposal = space.clamp(std::move(proposal));
}

std::vector<Vec> soft_rime_step(const Population& population, const SearchSpace& space,
                                const Budget& budget, int w, RngStream& rng) {
  const double e = coeff_e(budget);
  const double cos_theta = std::cos(coeff_theta(budget));
  const double beta = coeff_beta(budget, w);
  const Vec& best = population.best().position;

  std::vector<Vec> proposed;
  proposed.reserve(population.size());
  for (const Agent& agent : population.agents) {
    Vec p = agent.position;
    soft_rime_agent(p, best, space, e, cos_theta, beta, rng);
    proposed.push_back(std::move(p));
  }
  return proposed;
}

std::vector<double> normalize_fitness(const Population& population) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const Agent& agent : population.agents) {
    const double f = *agent.fitness;
    if (!std::isfinite(f)) {
      throw NumericError("normalize_fitness: non-finite fitness");
    }
    lo = std::min(lo, f);
    hi = std::max(hi, f);
  }
  std::vector<double> nrom(population.size());
  if (lo == hi) {
    std::fill(nrom.begin(), nrom.end(), 0.5);
    return nrom;
  }
  for (std::size_t i = 0; i < population.size(); ++i) {
    nrom[i] = (*population.agents[i].fitness - lo) / (hi - lo);
  }
  return nrom;
}

std::vector<double> puncture_rates(const Population& population, PunctureNorm norm) {
  if (norm == PunctureNorm::min_max) {
    return normalize_fitness(population);
  }
  double sumsq = 0.0;
  for (const Agent& agent : population.agents) {
    const double f = *agent.fitness;
    if (!std::isfinite(f)) {
      throw NumericError("puncture_rates: non-finite fitness");
    }
    sumsq += f * f;
  }
  std::vector<double> rates(population.size());
  if (sumsq == 0.0) {
    std::fill(rates.begin(), rates.end(), 0.5);
    return rates;
  }
  const double scale = 1.0 / std::sqrt(sumsq);
  for (std::size_t i = 0; i < population.size(); ++i) {
    rates[i] = *population.agents[i].fitness * scale;
  }
  return rates;
}

void hard_rime_puncture(const Population& population, std::vector<Vec>& proposed, RngStream& rng,
                        PunctureNorm norm) {
  const std::vector<double> nrom = puncture_rates(population, norm);
  const Vec& best = population.best().position;
  for (std::size_t i = 0; i < proposed.size(); ++i) {
    for (Eigen::Index j = 0; j < proposed[i].size(); ++j) {
      if (rng.uniform01() < nrom[i]) {
        proposed[i][j] = best[j];
      }
    }
  }
}

void greedy_select(Population& parents, const Population& offspring) {
  for (std::size_t i = 0; i < parents.size(); ++i) {
    Agent& parent = parents.agents[i];
    const Agent& child = offspring.agents[i];
    if (*child.fitness < *parent.fitness) {
      parent.position = child.position;
      parent.fitness = child.fitness;
      parent.count = 0;
    } else {
      ++parent.count;
    }
  }
  parents.refresh_best();
}

Population make_offspring(const std::vector<Vec>& proposals) {
  Population offspring;
  offspring.agents.resize(proposals.size());
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    offspring.agents[i].position = proposals[i];
  }
  return offspring;
}

RunRecord run_rime(const Objective& objective, const SearchSpace& space,
                   const RimeParams& params, std::uint64_t seed) {
  space.validate();
  params.validate();

  const RngStream root(seed);
  RngStream init_rng = root.split(0);
  Population pop = initialize_population(space, params.np, init_rng);
  Budget budget{0, params.fes_max};
  evaluate(objective, pop, budget);

  RunRecord record;
  record.seed = seed;
  record.history.emplace_back(budget.used, *pop.best().fitness);

  const auto np = static_cast<std::uint64_t>(params.np);
  for (std::uint64_t g = 0; budget.remaining() >= np; ++g) {
    RngStream gen_rng = root.split(1 + g);
    std::vector<Vec> proposals = soft_rime_step(pop, space, budget, params.w, gen_rng);
    hard_rime_puncture(pop, proposals, gen_rng, params.puncture_norm);
    Population offspring = make_offspring(proposals);
    evaluate(objective, offspring, budget);
    greedy_select(pop, offspring);
    record.history.emplace_back(budget.used, *pop.best().fitness);
  }

  record.final_best = *pop.best().fitness;
  record.final_position = pop.best().position;
  return record;
}

}  // namespace rimeopt::rime

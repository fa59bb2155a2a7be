#include "rimeopt/core.hpp"

#include <cmath>
#include <limits>

namespace rimeopt {

void SearchSpace::validate() const {
  if (lower.size() == 0 || lower.size() != upper.size()) {
    throw ConfigError("search space: lower/upper must have equal positive length");
  }
  for (int j = 0; j < dim(); ++j) {
    if (!(lower[j] < upper[j])) {
      throw ConfigError("search space: lower >= upper at dimension " + std::to_string(j));
    }
  }
}

Vec SearchSpace::clamp(Vec x) const {
  for (int j = 0; j < dim(); ++j) {
    x[j] = std::min(std::max(x[j], lower[j]), upper[j]);
  }
  return x;
}

SearchSpace SearchSpace::uniform_box(int dim, double lo, double hi) {
  SearchSpace s;
  s.lower = Vec::Constant(dim, lo);
  s.upper = Vec::Constant(dim, hi);
  return s;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed) : seed_(seed) {
  // splitmix64 state initialization; the raw generator is splitmix64 itself,
  // which is plenty for this workload and keeps the stream trivially
  // reproducible and splittable.
  state_ = splitmix64(seed ^ 0xA02BDBF7BB3C0A7ULL);
}

std::uint64_t RngStream::next_u64() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  return lo + uniform01() * (hi - lo);
}

double RngStream::normal() {
  // Box-Muller, cosine branch only; u1 shifted into (0, 1] so log stays finite.
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::size_t RngStream::index(std::size_t n) {
  // Multiply-shift reduction; modulo bias is ~n * 2^-64, irrelevant here.
  return static_cast<std::size_t>(
      (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

RngStream RngStream::split(std::uint64_t salt) const {
  return RngStream(splitmix64(seed_ ^ splitmix64(salt ^ 0xD1B54A32D192ED03ULL)));
}

void Population::refresh_best() {
  best_index = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const double f = *agents[i].fitness;
    if (f < best) {
      best = f;
      best_index = i;
    }
  }
}

Population initialize_population(const SearchSpace& space, int np, RngStream& rng) {
  space.validate();
  if (np < 2) {
    throw ConfigError("population size must be at least 2, got " + std::to_string(np));
  }
  Population pop;
  pop.agents.resize(static_cast<std::size_t>(np));
  for (auto& agent : pop.agents) {
    agent.position.resize(space.dim());
    for (int j = 0; j < space.dim(); ++j) {
      agent.position[j] = space.lower[j] + rng.uniform01() * (space.upper[j] - space.lower[j]);
    }
  }
  return pop;
}

EvalOutcome evaluate(const Objective& objective, Population& population, Budget& budget) {
  std::uint64_t pending = 0;
  for (const auto& agent : population.agents) {
    if (!agent.evaluated()) ++pending;
  }
  if (pending > budget.remaining()) {
    return EvalOutcome::budget_exhausted;
  }
  for (auto& agent : population.agents) {
    if (!agent.evaluated()) {
      agent.fitness = objective(agent.position);
      ++budget.used;
    }
  }
  population.refresh_best();
  return EvalOutcome::done;
}

}  // namespace rimeopt

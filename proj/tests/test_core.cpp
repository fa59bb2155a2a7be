#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rimeopt/core.hpp"

using namespace rimeopt;

namespace {

Objective sphere() {
  return [](const Vec& x) { return x.squaredNorm(); };
}

}  // namespace

TEST_CASE("search space validation") {
  SearchSpace space = SearchSpace::uniform_box(3, -1.0, 1.0);
  CHECK_NOTHROW(space.validate());

  SearchSpace degenerate = space;
  degenerate.upper[0] = degenerate.lower[0];  // lower == upper on dim 0
  CHECK_THROWS_AS(degenerate.validate(), ConfigError);

  SearchSpace inverted = space;
  inverted.lower[2] = 2.0;
  CHECK_THROWS_AS(inverted.validate(), ConfigError);
}

TEST_CASE("initialize_population stays in bounds") {
  SearchSpace space = SearchSpace::uniform_box(2, -1.0, 1.0);
  RngStream rng(7);
  Population pop = initialize_population(space, 3, rng);
  CHECK(pop.size() == 3);
  for (const Agent& agent : pop.agents) {
    CHECK(agent.position.size() == 2);
    CHECK_FALSE(agent.evaluated());
    CHECK(agent.count == 0);
    for (int j = 0; j < 2; ++j) {
      CHECK(agent.position[j] >= -1.0);
      CHECK(agent.position[j] <= 1.0);
    }
  }
}

TEST_CASE("initialize_population rejects np < 2 and bad spaces") {
  SearchSpace space = SearchSpace::uniform_box(2, -1.0, 1.0);
  RngStream rng(7);
  CHECK_THROWS_AS(initialize_population(space, 1, rng), ConfigError);

  SearchSpace bad = space;
  bad.lower[0] = bad.upper[0];
  CHECK_THROWS_AS(initialize_population(bad, 3, rng), ConfigError);
}

TEST_CASE("fixed seed reproduces the population exactly") {
  SearchSpace space = SearchSpace::uniform_box(5, -3.0, 9.0);
  RngStream a(42), b(42);
  Population first = initialize_population(space, 4, a);
  Population second = initialize_population(space, 4, b);
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(first.agents[i].position == second.agents[i].position);
  }
}

TEST_CASE("evaluate computes fitness, best index and budget") {
  SearchSpace space = SearchSpace::uniform_box(2, -1.0, 1.0);
  Population pop;
  pop.agents.resize(2);
  pop.agents[0].position = Vec::Zero(2);
  pop.agents[1].position = Vec::Ones(2);
  Budget budget{0, 10};

  CHECK(evaluate(sphere(), pop, budget) == EvalOutcome::done);
  CHECK(*pop.agents[0].fitness == 0.0);
  CHECK(*pop.agents[1].fitness == 2.0);
  CHECK(pop.best_index == 0);
  CHECK(budget.used == 2);

  // Already-evaluated agents are not recharged.
  CHECK(evaluate(sphere(), pop, budget) == EvalOutcome::done);
  CHECK(budget.used == 2);
}

TEST_CASE("evaluate is all-or-nothing under a short budget") {
  Population pop;
  pop.agents.resize(5);
  for (auto& agent : pop.agents) agent.position = Vec::Ones(2);
  Budget budget{0, 3};

  int calls = 0;
  Objective counting = [&calls](const Vec& x) {
    ++calls;
    return x.squaredNorm();
  };
  CHECK(evaluate(counting, pop, budget) == EvalOutcome::budget_exhausted);
  CHECK(calls == 0);
  CHECK(budget.used == 0);
  for (const auto& agent : pop.agents) CHECK_FALSE(agent.evaluated());
}

TEST_CASE("rng streams are deterministic and splits are draw-independent") {
  RngStream a(1234), b(1234);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.uniform01() == b.uniform01());
  }

  // Splitting does not depend on how much the parent has consumed.
  RngStream parent1(99), parent2(99);
  parent1.uniform01();
  parent1.normal();
  RngStream c1 = parent1.split(5);
  RngStream c2 = parent2.split(5);
  for (int i = 0; i < 10; ++i) {
    CHECK(c1.uniform01() == c2.uniform01());
  }

  // Different salts give different streams.
  RngStream d1 = parent2.split(6);
  bool differs = false;
  RngStream c3 = parent2.split(5);
  for (int i = 0; i < 10; ++i) {
    differs = differs || (c3.uniform01() != d1.uniform01());
  }
  CHECK(differs);
}

TEST_CASE("rng draw ranges") {
  RngStream rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const std::size_t k = rng.index(7);
    CHECK(k < 7);
  }
  // Normal draws have roughly the right spread.
  RngStream nrng(4);
  double sum = 0.0, sumsq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double z = nrng.normal();
    sum += z;
    sumsq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.05);
  CHECK(sumsq / n == doctest::Approx(1.0).epsilon(0.05));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "rimeopt/stats.hpp"

using namespace rimeopt;
using namespace rimeopt::stats;

namespace {

ResultMatrix matrix_from_means(const std::vector<std::string>& algos,
                               const std::vector<std::vector<double>>& per_problem_means) {
  // One run per cell whose value equals the desired mean.
  ResultMatrix m;
  m.algorithms = algos;
  for (std::size_t p = 0; p < per_problem_means.size(); ++p) {
    m.problems.push_back("p" + std::to_string(p));
  }
  m.cells.assign(algos.size(), std::vector<std::vector<double>>(per_problem_means.size()));
  for (std::size_t p = 0; p < per_problem_means.size(); ++p) {
    for (std::size_t a = 0; a < algos.size(); ++a) {
      m.cells[a][p] = {per_problem_means[p][a]};
    }
  }
  return m;
}

// Independent oracle: bitmask enumeration over pooled average ranks,
// distinct from the library's recursive combination walk.
double oracle_exact_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::vector<double> ranks = average_ranks(pooled);
  const std::size_t n = pooled.size();
  const std::size_t na = a.size();
  const double w = std::accumulate(ranks.begin(), ranks.begin() + na, 0.0);
  const double mu = static_cast<double>(na) * (n + 1) / 2.0;

  std::uint64_t hits = 0, total = 0;
  for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
    if (std::popcount(mask) != static_cast<int>(na)) continue;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1ull << i)) sum += ranks[i];
    }
    ++total;
    if (std::abs(sum - mu) >= std::abs(w - mu) - 1e-12) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace

TEST_CASE("average_ranks with ties") {
  const std::vector<double> values{3.0, 1.0, 3.0, 2.0};
  const auto ranks = average_ranks(values);
  CHECK(ranks == std::vector<double>{3.5, 1.0, 3.5, 2.0});

  // Ranks always sum to n(n+1)/2 regardless of ties.
  RngStream rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v;
    const std::size_t n = 1 + rng.index(12);
    for (std::size_t i = 0; i < n; ++i) {
      v.push_back(static_cast<double>(rng.index(4)));  // many ties
    }
    const auto r = average_ranks(v);
    const double total = std::accumulate(r.begin(), r.end(), 0.0);
    CHECK(total == doctest::Approx(n * (n + 1) / 2.0).epsilon(1e-12));
  }
}

TEST_CASE("mean_rank_table") {
  SUBCASE("uniformly dominant algorithm ranks 1.0") {
    const auto m = matrix_from_means({"A", "B", "C"}, {{1.0, 2.0, 3.0}, {0.5, 2.0, 9.0}});
    const auto ranks = mean_rank_table(m);
    CHECK(ranks[0] == 1.0);
  }
  SUBCASE("identical algorithms tie at 1.5") {
    const auto m = matrix_from_means({"A", "B"}, {{2.0, 2.0}, {5.0, 5.0}});
    const auto ranks = mean_rank_table(m);
    CHECK(ranks == std::vector<double>{1.5, 1.5});
  }
  SUBCASE("hand case: opposing orders average out") {
    const auto m = matrix_from_means({"A", "B", "C"}, {{1.0, 2.0, 3.0}, {3.0, 2.0, 1.0}});
    const auto ranks = mean_rank_table(m);
    CHECK(ranks == std::vector<double>{2.0, 2.0, 2.0});
  }
  SUBCASE("empty matrix errors") {
    ResultMatrix empty;
    CHECK_THROWS_AS(mean_rank_table(empty), ConfigError);
  }
}

TEST_CASE("friedman test") {
  SUBCASE("all algorithms identical: statistic 0, p 1") {
    const auto m = matrix_from_means({"A", "B", "C"}, {{2.0, 2.0, 2.0}, {7.0, 7.0, 7.0}});
    const auto r = friedman_test(m);
    CHECK(r.chi2 == 0.0);
    CHECK(r.p == 1.0);
  }
  SUBCASE("ranks always 1/2/3 over four problems: chi2 8, p ~ 0.0183") {
    const auto m = matrix_from_means(
        {"A", "B", "C"},
        {{1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}});
    const auto r = friedman_test(m);
    CHECK(r.chi2 == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(r.p == doctest::Approx(0.0183156).epsilon(1e-3));
    CHECK(r.mean_ranks == std::vector<double>{1.0, 2.0, 3.0});
  }
  SUBCASE("tie-corrected statistic matches the reference implementation") {
    // Reference values from SciPy's friedmanchisquare on the same table.
    const auto m = matrix_from_means({"A", "B", "C", "D"}, {{1.0, 1.0, 2.0, 3.0},
                                                            {2.0, 1.0, 1.0, 4.0},
                                                            {1.0, 2.0, 3.0, 3.0},
                                                            {5.0, 5.0, 5.0, 5.0},
                                                            {2.0, 1.0, 4.0, 3.0}});
    const auto r = friedman_test(m);
    CHECK(r.chi2 == doctest::Approx(7.540540540540539).epsilon(1e-9));
    CHECK(r.p == doctest::Approx(0.056525890987944256).epsilon(1e-9));
  }
  SUBCASE("p-values stay within [0,1]") {
    RngStream rng(8);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<std::vector<double>> means(3, std::vector<double>(4));
      for (auto& row : means) {
        for (double& v : row) v = rng.uniform(0.0, 5.0);
      }
      const auto r = friedman_test(matrix_from_means({"A", "B", "C", "D"}, means));
      CHECK(r.p >= 0.0);
      CHECK(r.p <= 1.0);
    }
  }
}

TEST_CASE("wilcoxon exact path") {
  SUBCASE("extreme separation of three vs three gives p = 0.1") {
    const std::vector<double> a{1.0, 2.0, 3.0}, b{10.0, 11.0, 12.0};
    CHECK(wilcoxon_exact_p(a, b) == doctest::Approx(0.1).epsilon(1e-15));
    const auto r = wilcoxon_rank_sum(a, b, 0.05);
    CHECK(r.p == doctest::Approx(0.1));
    CHECK(r.verdict == Verdict::equal);  // 0.1 >= alpha
  }
  SUBCASE("identical samples are equal with p 1") {
    const std::vector<double> a{4.0, 4.0, 4.0}, b{4.0, 4.0};
    const auto r = wilcoxon_rank_sum(a, b, 0.05);
    CHECK(r.p == 1.0);
    CHECK(r.verdict == Verdict::equal);
  }
  SUBCASE("tied pooled data uses the conditional permutation distribution") {
    const std::vector<double> a{1.0, 2.0, 2.0, 3.0}, b{2.0, 3.0, 4.0};
    CHECK(wilcoxon_exact_p(a, b) == doctest::Approx(2.0 / 7.0).epsilon(1e-12));
  }
  SUBCASE("agrees with the independent bitmask oracle") {
    RngStream rng(31);
    for (int trial = 0; trial < 60; ++trial) {
      const std::size_t na = 1 + rng.index(6);
      const std::size_t nb = 1 + rng.index(6);
      std::vector<double> a(na), b(nb);
      for (double& v : a) v = static_cast<double>(rng.index(6));
      for (double& v : b) v = static_cast<double>(rng.index(6));
      CHECK(wilcoxon_exact_p(a, b) == doctest::Approx(oracle_exact_p(a, b)).epsilon(1e-14));
    }
  }
  SUBCASE("guards the enumeration size") {
    const std::vector<double> big(20, 1.0), big2(20, 2.0);
    CHECK_THROWS_AS(wilcoxon_exact_p(big, big2), ConfigError);
  }
}

TEST_CASE("wilcoxon normal approximation") {
  // 1..10 vs 11..20: z = -3.74185, two-sided p = 1.8267e-4 (verified against
  // SciPy's asymptotic Mann-Whitney with continuity correction).
  std::vector<double> a(10), b(10);
  std::iota(a.begin(), a.end(), 1.0);
  std::iota(b.begin(), b.end(), 11.0);
  CHECK(wilcoxon_normal_p(a, b) == doctest::Approx(1.8267179e-4).epsilon(1e-6));

  const auto r = wilcoxon_rank_sum(a, b, 0.05);
  CHECK(r.p < 0.001);
  CHECK(r.verdict == Verdict::win);

  // Fully tied data short-circuits to p 1.
  const std::vector<double> t1(9, 3.0), t2(9, 3.0);
  CHECK(wilcoxon_normal_p(t1, t2) == 1.0);
}

TEST_CASE("exact and normal paths agree near the boundary size") {
  RngStream rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> a(8), b(8);
    for (double& v : a) v = rng.uniform(0.0, 1.0);
    for (double& v : b) v = rng.uniform(0.0, 1.0) + 0.2;
    const double exact = wilcoxon_exact_p(a, b);
    const double approx = wilcoxon_normal_p(a, b);
    CHECK(std::abs(exact - approx) <= 0.02);
  }
}

TEST_CASE("kruskal-wallis") {
  SUBCASE("hand case {1,2,3} vs {4,5,6}") {
    const auto r = kruskal_wallis({{1.0, 2.0, 3.0}, {4.0, 5.0, 6.0}});
    CHECK(r.h == doctest::Approx(3.857142857).epsilon(1e-3));
    CHECK(r.p == doctest::Approx(0.049534613).epsilon(1e-3));
  }
  SUBCASE("identical groups: H 0, p 1") {
    const auto r = kruskal_wallis({{2.0, 2.0}, {2.0, 2.0}});
    CHECK(r.h == 0.0);
    CHECK(r.p == 1.0);
  }
  SUBCASE("tie-corrected value matches the reference implementation") {
    // SciPy kruskal on the same groups.
    const auto r =
        kruskal_wallis({{1.0, 2.0, 2.0, 3.0}, {2.0, 4.0, 5.0}, {1.0, 1.0, 6.0}});
    CHECK(r.h == doctest::Approx(1.6528662420382143).epsilon(1e-9));
    CHECK(r.p == doctest::Approx(0.4376073985024037).epsilon(1e-9));
  }
  SUBCASE("H is nonnegative on random groups") {
    RngStream rng(23);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<std::vector<double>> groups(3);
      for (auto& g : groups) {
        g.resize(4);
        for (double& v : g) v = rng.uniform(0.0, 3.0);
      }
      CHECK(kruskal_wallis(groups).h >= 0.0);
    }
  }
}

TEST_CASE("rank invariance under strictly monotone transforms") {
  // 2x + 7 and x^3 on positive data leave every rank-based result unchanged.
  const std::vector<std::vector<double>> means{{1.0, 2.5, 4.0}, {3.0, 0.5, 2.0},
                                               {2.0, 2.0, 5.0}};
  auto transform = [&](auto f) {
    std::vector<std::vector<double>> out = means;
    for (auto& row : out) {
      for (double& v : row) v = f(v);
    }
    return out;
  };
  const auto base = friedman_test(matrix_from_means({"A", "B", "C"}, means));
  const auto affine = friedman_test(
      matrix_from_means({"A", "B", "C"}, transform([](double v) { return 2.0 * v + 7.0; })));
  const auto cubic = friedman_test(
      matrix_from_means({"A", "B", "C"}, transform([](double v) { return v * v * v; })));
  CHECK(base.chi2 == doctest::Approx(affine.chi2).epsilon(1e-12));
  CHECK(base.chi2 == doctest::Approx(cubic.chi2).epsilon(1e-12));

  const std::vector<double> a{0.5, 1.5, 2.5, 9.0}, b{1.0, 3.0, 4.0};
  auto map_vec = [](const std::vector<double>& v, auto f) {
    std::vector<double> out;
    for (double x : v) out.push_back(f(x));
    return out;
  };
  const double p0 = wilcoxon_exact_p(a, b);
  CHECK(wilcoxon_exact_p(map_vec(a, [](double v) { return 2.0 * v + 7.0; }),
                         map_vec(b, [](double v) { return 2.0 * v + 7.0; })) ==
        doctest::Approx(p0).epsilon(1e-14));
  CHECK(wilcoxon_exact_p(map_vec(a, [](double v) { return v * v * v; }),
                         map_vec(b, [](double v) { return v * v * v; })) ==
        doctest::Approx(p0).epsilon(1e-14));

  const auto kw0 = kruskal_wallis({a, b});
  const auto kw1 = kruskal_wallis({map_vec(a, [](double v) { return v * v * v; }),
                                   map_vec(b, [](double v) { return v * v * v; })});
  CHECK(kw0.h == doctest::Approx(kw1.h).epsilon(1e-12));
}

TEST_CASE("wel_table") {
  ResultMatrix m;
  m.algorithms = {"cand", "weak", "twin"};
  m.problems = {"p0", "p1"};
  m.cells.assign(3, std::vector<std::vector<double>>(2));
  for (std::size_t p = 0; p < 2; ++p) {
    std::vector<double> cand, weak;
    for (int r = 0; r < 10; ++r) {
      cand.push_back(static_cast<double>(r));
      weak.push_back(static_cast<double>(r) + 100.0);
    }
    m.cells[0][p] = cand;
    m.cells[1][p] = weak;
    m.cells[2][p] = cand;  // identical twin
  }

  const auto table = wel_table(m, "cand", 0.05);
  CHECK(table.at("cand").equal == 2);  // candidate row vs itself
  CHECK(table.at("cand").win == 0);
  CHECK(table.at("weak").win == 2);  // strict domination on every problem
  CHECK(table.at("weak").loss == 0);
  CHECK(table.at("twin").equal == 2);
  for (const auto& [name, counts] : table) {
    CHECK(counts.win + counts.equal + counts.loss == 2);
  }

  CHECK_THROWS_AS(wel_table(m, "missing", 0.05), ConfigError);
}

TEST_CASE("result matrix validation names offenders") {
  ResultMatrix m;
  m.algorithms = {"A", "B"};
  m.problems = {"p0"};
  m.cells.assign(2, std::vector<std::vector<double>>(1));
  m.cells[0][0] = {1.0, 2.0};
  m.cells[1][0] = {1.0};  // run-count mismatch
  try {
    m.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("B") != std::string::npos);
    CHECK(std::string(e.what()).find("p0") != std::string::npos);
  }
}

TEST_CASE("chi-square upper tail") {
  CHECK(chi_square_upper_tail(8.0, 2) == doctest::Approx(std::exp(-4.0)).epsilon(1e-12));
  CHECK(chi_square_upper_tail(0.0, 3) == 1.0);
  CHECK(chi_square_upper_tail(-1.0, 3) == 1.0);
  CHECK(chi_square_upper_tail(3.857142857, 1) == doctest::Approx(0.0495346).epsilon(1e-5));
}

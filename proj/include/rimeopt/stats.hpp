#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "rimeopt/core.hpp"

namespace rimeopt::stats {

/// Final best-fitness samples per (algorithm, problem) cell.
struct ResultMatrix {
  std::vector<std::string> algorithms;
  std::vector<std::string> problems;
  /// cells[a][p] holds the per-run finals; every cell of one experiment has
  /// the same run count.
  std::vector<std::vector<std::vector<double>>> cells;

  std::size_t algorithm_index(const std::string& name) const;
  /// Throws ConfigError when shapes are inconsistent, a cell is empty, or
  /// run counts differ (naming the offending cell).
  void validate() const;
};

/// 1-based ranks of values ascending, ties receiving their average rank.
std::vector<double> average_ranks(std::span<const double> values);

/// Per-algorithm rank averaged across problems; per problem the algorithms
/// are ranked by their mean over runs (rank 1 = smallest mean).
std::vector<double> mean_rank_table(const ResultMatrix& matrix);

struct FriedmanResult {
  std::vector<double> mean_ranks;
  double chi2 = 0.0;
  double p = 1.0;
};

/// Friedman test over per-problem mean ranks with the standard tie
/// correction; an everywhere-tied matrix degenerates to chi2 0, p 1.
FriedmanResult friedman_test(const ResultMatrix& matrix);

enum class Verdict { win, equal, loss };

const char* verdict_name(Verdict v);

struct RankSumResult {
  double p = 1.0;
  Verdict verdict = Verdict::equal;
};

/// Two-sided exact rank-sum p-value by full enumeration of the C(n, n_a)
/// rank subsets: p = P(|W' - mu| >= |W - mu|). Tie-safe (average ranks).
/// Guarded to n_a + n_b <= 24.
double wilcoxon_exact_p(std::span<const double> a, std::span<const double> b);

/// Two-sided normal approximation with tie-corrected variance and a 0.5
/// continuity correction toward the mean.
double wilcoxon_normal_p(std::span<const double> a, std::span<const double> b);

/// Rank-sum test dispatching to the exact path when both samples have fewer
/// than 8 values, the normal approximation otherwise. Verdict at level
/// alpha: equal when p >= alpha or the sample medians coincide, else win
/// when median(a) < median(b) (minimization, a = candidate).
RankSumResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b,
                                double alpha);

struct KruskalResult {
  double h = 0.0;
  double p = 1.0;
};

/// Kruskal-Wallis H test with tie correction; identical groups give H 0, p 1.
KruskalResult kruskal_wallis(const std::vector<std::vector<double>>& groups);

struct WelCounts {
  int win = 0;
  int equal = 0;
  int loss = 0;
};

/// Per-opponent win/equal/loss counts of the candidate across all problems,
/// one rank-sum test per (opponent, problem). Counts sum to the problem count.
std::map<std::string, WelCounts> wel_table(const ResultMatrix& matrix,
                                           const std::string& candidate, double alpha);

/// Upper-tail chi-square probability, P(X >= x) with dof degrees of freedom.
double chi_square_upper_tail(double x, int dof);

}  // namespace rimeopt::stats

#include "rimeopt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>

namespace rimeopt::stats {

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

/// Pooled average ranks of a ++ b, plus the tie term sum(t^3 - t).
struct PooledRanks {
  std::vector<double> ranks;  // a's ranks first, then b's
  double tie_term = 0.0;
};

PooledRanks pooled_ranks(std::span<const double> a, std::span<const double> b) {
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  PooledRanks out;
  out.ranks = average_ranks(pooled);

  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    out.tie_term += t * t * t - t;
    i = j;
  }
  return out;
}

double tie_term_of(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  double term = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    term += t * t * t - t;
    i = j;
  }
  return term;
}

// Count subsets of size `take` from ranks[idx..] whose sum, offset by
// `partial`, lands at distance >= threshold from the null mean.
void count_extreme_subsets(const std::vector<double>& ranks, std::size_t idx, std::size_t take,
                           double partial, double mu, double threshold, std::uint64_t& hits,
                           std::uint64_t& total) {
  if (take == 0) {
    ++total;
    if (std::abs(partial - mu) >= threshold - 1e-12) ++hits;
    return;
  }
  if (ranks.size() - idx < take) return;
  count_extreme_subsets(ranks, idx + 1, take - 1, partial + ranks[idx], mu, threshold, hits,
                        total);
  count_extreme_subsets(ranks, idx + 1, take, partial, mu, threshold, hits, total);
}

}  // namespace

std::size_t ResultMatrix::algorithm_index(const std::string& name) const {
  for (std::size_t i = 0; i < algorithms.size(); ++i) {
    if (algorithms[i] == name) return i;
  }
  throw ConfigError("algorithm not in result matrix: " + name);
}

void ResultMatrix::validate() const {
  if (algorithms.empty() || problems.empty()) {
    throw ConfigError("result matrix: no algorithms or problems");
  }
  if (cells.size() != algorithms.size()) {
    throw ConfigError("result matrix: cell rows do not match algorithms");
  }
  std::size_t runs = 0;
  for (std::size_t a = 0; a < algorithms.size(); ++a) {
    if (cells[a].size() != problems.size()) {
      throw ConfigError("result matrix: cell columns do not match problems for " + algorithms[a]);
    }
    for (std::size_t p = 0; p < problems.size(); ++p) {
      if (cells[a][p].empty()) {
        throw ConfigError("result matrix: empty cell (" + algorithms[a] + ", " + problems[p] +
                          ")");
      }
      if (runs == 0) runs = cells[a][p].size();
      if (cells[a][p].size() != runs) {
        throw ConfigError("result matrix: run count mismatch at (" + algorithms[a] + ", " +
                          problems[p] + ")");
      }
    }
  }
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t t = i; t < j; ++t) {
      ranks[order[t]] = avg;
    }
    i = j;
  }
  return ranks;
}

std::vector<double> mean_rank_table(const ResultMatrix& matrix) {
  matrix.validate();
  const std::size_t k = matrix.algorithms.size();
  const std::size_t n = matrix.problems.size();
  std::vector<double> rank_sum(k, 0.0);
  for (std::size_t p = 0; p < n; ++p) {
    std::vector<double> means(k);
    for (std::size_t a = 0; a < k; ++a) {
      const auto& cell = matrix.cells[a][p];
      means[a] = std::accumulate(cell.begin(), cell.end(), 0.0) / cell.size();
    }
    const std::vector<double> ranks = average_ranks(means);
    for (std::size_t a = 0; a < k; ++a) rank_sum[a] += ranks[a];
  }
  for (double& r : rank_sum) r /= static_cast<double>(n);
  return rank_sum;
}

FriedmanResult friedman_test(const ResultMatrix& matrix) {
  matrix.validate();
  const auto k = static_cast<double>(matrix.algorithms.size());
  const auto n = static_cast<double>(matrix.problems.size());
  if (matrix.algorithms.size() < 2) {
    throw ConfigError("friedman_test: needs at least 2 algorithms");
  }

  FriedmanResult result;
  result.mean_ranks = mean_rank_table(matrix);

  double tie_sum = 0.0;
  for (std::size_t p = 0; p < matrix.problems.size(); ++p) {
    std::vector<double> means(matrix.algorithms.size());
    for (std::size_t a = 0; a < matrix.algorithms.size(); ++a) {
      const auto& cell = matrix.cells[a][p];
      means[a] = std::accumulate(cell.begin(), cell.end(), 0.0) / cell.size();
    }
    tie_sum += tie_term_of(means);
  }

  double spread = 0.0;
  for (double r : result.mean_ranks) {
    const double d = r - (k + 1.0) / 2.0;
    spread += d * d;
  }
  const double chi2_raw = 12.0 * n / (k * (k + 1.0)) * spread;
  const double correction = 1.0 - tie_sum / (n * k * (k * k - 1.0));
  if (correction <= 0.0) {
    result.chi2 = 0.0;
    result.p = 1.0;
    return result;
  }
  result.chi2 = chi2_raw / correction;
  result.p = chi_square_upper_tail(result.chi2, static_cast<int>(k) - 1);
  return result;
}

double wilcoxon_exact_p(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw ConfigError("wilcoxon_exact_p: empty sample");
  }
  if (a.size() + b.size() > 24) {
    throw ConfigError("wilcoxon_exact_p: enumeration limited to 24 pooled values");
  }
  const PooledRanks pooled = pooled_ranks(a, b);
  const std::size_t na = a.size();
  const std::size_t n = pooled.ranks.size();
  const double w = std::accumulate(pooled.ranks.begin(), pooled.ranks.begin() + na, 0.0);
  const double mu = static_cast<double>(na) * (n + 1) / 2.0;

  std::uint64_t hits = 0;
  std::uint64_t total = 0;
  count_extreme_subsets(pooled.ranks, 0, na, 0.0, mu, std::abs(w - mu), hits, total);
  return static_cast<double>(hits) / static_cast<double>(total);
}

double wilcoxon_normal_p(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw ConfigError("wilcoxon_normal_p: empty sample");
  }
  const PooledRanks pooled = pooled_ranks(a, b);
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  const double n = na + nb;
  const double w = std::accumulate(pooled.ranks.begin(), pooled.ranks.begin() + a.size(), 0.0);
  const double mu = na * (n + 1.0) / 2.0;
  const double var = na * nb / 12.0 * ((n + 1.0) - pooled.tie_term / (n * (n - 1.0)));
  if (var <= 0.0) {
    return 1.0;  // every pooled value tied
  }
  const double diff = w - mu;
  const double cc = diff > 0.0 ? -0.5 : diff < 0.0 ? 0.5 : 0.0;
  const double z = (diff + cc) / std::sqrt(var);
  return std::min(1.0, 2.0 * normal_upper_tail(std::abs(z)));
}

RankSumResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b,
                                double alpha) {
  RankSumResult result;
  result.p = std::max(a.size(), b.size()) < 8 ? wilcoxon_exact_p(a, b) : wilcoxon_normal_p(a, b);
  if (result.p >= alpha) {
    result.verdict = Verdict::equal;
    return result;
  }
  const double med_a = median({a.begin(), a.end()});
  const double med_b = median({b.begin(), b.end()});
  if (med_a < med_b) {
    result.verdict = Verdict::win;
  } else if (med_a > med_b) {
    result.verdict = Verdict::loss;
  } else {
    result.verdict = Verdict::equal;
  }
  return result;
}

KruskalResult kruskal_wallis(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) {
    throw ConfigError("kruskal_wallis: needs at least 2 groups");
  }
  std::vector<double> pooled;
  for (const auto& g : groups) {
    if (g.empty()) throw ConfigError("kruskal_wallis: empty group");
    pooled.insert(pooled.end(), g.begin(), g.end());
  }
  const double n = static_cast<double>(pooled.size());
  const std::vector<double> ranks = average_ranks(pooled);

  KruskalResult result;
  double stat = 0.0;
  std::size_t offset = 0;
  for (const auto& g : groups) {
    const double rank_mean =
        std::accumulate(ranks.begin() + offset, ranks.begin() + offset + g.size(), 0.0) /
        static_cast<double>(g.size());
    const double d = rank_mean - (n + 1.0) / 2.0;
    stat += static_cast<double>(g.size()) * d * d;
    offset += g.size();
  }
  stat *= 12.0 / (n * (n + 1.0));
  const double correction = 1.0 - tie_term_of(pooled) / (n * n * n - n);
  if (correction <= 0.0) {
    return result;  // all values tied: H 0, p 1
  }
  result.h = stat / correction;
  result.p = chi_square_upper_tail(result.h, static_cast<int>(groups.size()) - 1);
  return result;
}

std::map<std::string, WelCounts> wel_table(const ResultMatrix& matrix,
                                           const std::string& candidate, double alpha) {
  matrix.validate();
  const std::size_t cand = matrix.algorithm_index(candidate);
  std::map<std::string, WelCounts> table;
  for (std::size_t a = 0; a < matrix.algorithms.size(); ++a) {
    WelCounts counts;  // the candidate's own row degenerates to all-equal
    for (std::size_t p = 0; p < matrix.problems.size(); ++p) {
      const RankSumResult r = wilcoxon_rank_sum(matrix.cells[cand][p], matrix.cells[a][p], alpha);
      switch (r.verdict) {
        case Verdict::win: ++counts.win; break;
        case Verdict::equal: ++counts.equal; break;
        case Verdict::loss: ++counts.loss; break;
      }
    }
    table[matrix.algorithms[a]] = counts;
  }
  return table;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::win: return "win";
    case Verdict::equal: return "equal";
    case Verdict::loss: return "loss";
  }
  return "?";
}

double chi_square_upper_tail(double x, int dof) {
  if (x <= 0.0) return 1.0;
  const boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, x));
}

}  // namespace rimeopt::stats

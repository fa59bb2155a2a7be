#include "rimeopt/linalg.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>

namespace rimeopt::linalg {

std::vector<double> rank_weights(std::size_t s, WeightMode mode) {
  if (s == 0) {
    throw ConfigError("rank_weights: group size must be at least 1");
  }
  const double log_sp1 = std::log(static_cast<double>(s) + 1.0);
  double denom = 0.0;
  for (std::size_t k = 1; k <= s; ++k) {
    denom += log_sp1 - std::log(static_cast<double>(k));
  }
  std::vector<double> w(s);
  for (std::size_t i = 1; i <= s; ++i) {
    const double numer =
        mode == WeightMode::corrected ? log_sp1 - std::log(static_cast<double>(i)) : log_sp1;
    w[i - 1] = numer / denom;
  }
  return w;
}

Vec weighted_mean(std::span<const Vec> members, std::span<const double> weights) {
  if (members.empty() || members.size() != weights.size()) {
    throw ConfigError("weighted_mean: members/weights size mismatch");
  }
  const Eigen::Index dim = members[0].size();
  Vec mean = Vec::Zero(dim);
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (members[i].size() != dim) {
      throw ConfigError("weighted_mean: inconsistent member dimension");
    }
    mean += weights[i] * members[i];
  }
  return mean;
}

Mat scatter_covariance(std::span<const Vec> members, const Vec& mean) {
  if (members.empty()) {
    throw ConfigError("scatter_covariance: needs at least one member");
  }
  const Eigen::Index dim = mean.size();
  Mat cov = Mat::Zero(dim, dim);
  for (const Vec& x : members) {
    const Vec d = x - mean;
    cov.noalias() += d * d.transpose();
  }
  cov /= static_cast<double>(members.size());
  return cov;
}

CholeskyResult cholesky_jittered(const Mat& cov) {
  if (!cov.allFinite()) {
    throw NumericError("cholesky_jittered: covariance has non-finite entries");
  }
  const Eigen::Index dim = cov.rows();
  const double trace = cov.trace();
  const double base = trace > 0.0 ? 1e-10 * trace / static_cast<double>(dim) : 1e-10;

  double jitter = 0.0;
  for (int attempt = 0; attempt <= 8; ++attempt) {
    Mat shifted = cov;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<Mat> llt(shifted);
    if (llt.info() == Eigen::Success) {
      return {Mat(llt.matrixL()), jitter};
    }
    jitter = jitter == 0.0 ? base : jitter * 10.0;
  }
  throw NumericError("cholesky_jittered: factorization failed after 8 jitter retries");
}

GaussianModel GaussianModel::fit(std::span<const Vec> members, WeightMode mode) {
  const std::vector<double> w = rank_weights(members.size(), mode);
  GaussianModel model;
  model.mean = weighted_mean(members, w);
  model.cov = scatter_covariance(members, model.mean);
  CholeskyResult chol = cholesky_jittered(model.cov);
  model.chol = std::move(chol.lower);
  model.jitter = chol.jitter;
  return model;
}

Vec mvn_sample(const GaussianModel& model, RngStream& rng) {
  Vec z(model.dim());
  for (int j = 0; j < model.dim(); ++j) {
    z[j] = rng.normal();
  }
  return model.mean + model.chol * z;
}

}  // namespace rimeopt::linalg

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "rimeopt/core.hpp"

namespace rimeopt::linalg {

using Mat = Eigen::MatrixXd;

/// Weighting scheme for the elite-group mean.
///   corrected: rank-decaying log weights, w_i = (ln(s+1) - ln i) / sum_k (...)
///   verbatim:  the flat form w_i = ln(s+1) / sum_k (ln(s+1) - ln k), kept as
///              a sensitivity switch (it is constant across ranks and does not
///              generally sum to 1).
enum class WeightMode { corrected, verbatim };

/// Weights for s members ranked best-first (rank 1 = best). In corrected
/// mode the weights are strictly decreasing and sum to 1.
std::vector<double> rank_weights(std::size_t s, WeightMode mode = WeightMode::corrected);

/// Componentwise weighted sum of the member positions.
Vec weighted_mean(std::span<const Vec> members, std::span<const double> weights);

/// Scatter matrix (1/|S|) * sum (x_i - mean)(x_i - mean)^T. Symmetric PSD.
Mat scatter_covariance(std::span<const Vec> members, const Vec& mean);

struct CholeskyResult {
  Mat lower;
  double jitter = 0.0;
};

/// Lower-triangular factor L with L L^T = cov + jitter*I. Tries jitter 0
/// first, then escalates geometrically from 1e-10 * trace/dim (absolute
/// floor 1e-10 when the trace is zero), x10 per retry, at most 8 retries.
/// Throws NumericError on non-finite input or if every retry fails.
CholeskyResult cholesky_jittered(const Mat& cov);

/// Weighted Gaussian fitted to an elite group: mean per the rank weights,
/// covariance as the unweighted 1/|S| scatter about that mean.
struct GaussianModel {
  Vec mean;
  Mat cov;
  Mat chol;
  double jitter = 0.0;

  int dim() const { return static_cast<int>(mean.size()); }

  /// members must be sorted best-fitness-first; s >= 1.
  static GaussianModel fit(std::span<const Vec> members,
                           WeightMode mode = WeightMode::corrected);
};

/// One draw from the model: mean + chol * z, z a vector of independent
/// standard normals (dim draws, in coordinate order).
Vec mvn_sample(const GaussianModel& model, RngStream& rng);

}  // namespace rimeopt::linalg

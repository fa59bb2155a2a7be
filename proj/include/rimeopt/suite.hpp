#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rimeopt/core.hpp"

namespace rimeopt::suite {

using Mat = Eigen::MatrixXd;

/// Base test functions, each with global minimum 0 at the origin. Closed
/// forms are documented at the implementation site.
enum class BaseFn {
  bent_cigar,
  zakharov,
  rosenbrock,
  rastrigin,
  schaffer_f6,
  lunacek_bi_rastrigin,
  rastrigin_noncont,
  levy,
  schwefel,
};

const char* base_name(BaseFn tag);
BaseFn base_from_name(const std::string& name);

/// Evaluate a base function at z (z in the function's natural scale).
/// lunacek_bi_rastrigin requires dim >= 2.
double base_function(BaseFn tag, const Vec& z);

enum class SuiteKind { cec2017_like, cec2022_like };

const char* suite_name(SuiteKind kind);
SuiteKind suite_from_name(const std::string& name);

/// Number of functions in a suite (29 / 12).
int function_count(SuiteKind kind);

/// Reporting class of a function: unimodal, multimodal, basic, hybrid or
/// composition.
std::string function_class(SuiteKind kind, int function_id);

enum class InstanceKind { shifted_rotated, hybrid, composition };

struct HybridPart {
  BaseFn base;
  double scale;
  int size;
};

struct CompositionPart {
  BaseFn base;
  double scale;
  Vec shift;
  Mat rotation;
  double sigma;
  double lambda;
  double delta_bias;
};

/// A fully materialized, seeded benchmark instance on [-100, 100]^D.
/// Shift and rotation data are synthetic (seeded), so absolute values are
/// not comparable with the official CEC data-file instances; the problem
/// classes and difficulty taxonomy are preserved.
struct BenchmarkInstance {
  SuiteKind suite;
  int function_id = 0;
  int dim = 0;
  std::uint64_t seed = 0;
  std::string id;
  double bias = 0.0;
  InstanceKind kind = InstanceKind::shifted_rotated;

  /// Optimum location (first component's shift for compositions).
  Vec shift;
  Mat rotation;

  // shifted_rotated only
  BaseFn base = BaseFn::bent_cigar;
  double scale = 1.0;

  // hybrid only
  std::vector<int> permutation;
  std::vector<HybridPart> parts;

  // composition only
  std::vector<CompositionPart> components;

  double evaluate(const Vec& x) const;
  SearchSpace space() const { return SearchSpace::uniform_box(dim, -100.0, 100.0); }

  /// One-line JSON descriptor (suite, function, dim, seed, bias) so configs
  /// can pin exact instances.
  std::string manifest() const;
};

/// Deterministic instance construction; identical arguments give identical
/// instances. Hybrid and composition functions require dim >= 10.
BenchmarkInstance make_instance(SuiteKind kind, int function_id, int dim, std::uint64_t seed);

/// Random orthogonal matrix: QR of a seeded Gaussian matrix with the R-sign
/// fix, so Q is Haar-ish and deterministic.
Mat random_rotation(int dim, RngStream& rng);

}  // namespace rimeopt::suite

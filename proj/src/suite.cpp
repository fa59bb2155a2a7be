#include "rimeopt/suite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

namespace rimeopt::suite {

namespace {

constexpr double kSchwefelOpt = 420.9687462275036;

double schwefel_term(double x, int dim) {
  // Modified Schwefel with the usual out-of-range quadratic penalty.
  if (x > 500.0) {
    const double m = 500.0 - std::fmod(x, 500.0);
    return m * std::sin(std::sqrt(std::abs(m))) -
           (x - 500.0) * (x - 500.0) / (10000.0 * dim);
  }
  if (x < -500.0) {
    const double m = std::fmod(std::abs(x), 500.0) - 500.0;
    return m * std::sin(std::sqrt(std::abs(m))) -
           (x + 500.0) * (x + 500.0) / (10000.0 * dim);
  }
  return x * std::sin(std::sqrt(std::abs(x)));
}

double schaffer_pair(double x, double y) {
  const double ss = x * x + y * y;
  const double s = std::sin(std::sqrt(ss));
  const double denom = 1.0 + 0.001 * ss;
  return 0.5 + (s * s - 0.5) / (denom * denom);
}

}  // namespace

double base_function(BaseFn tag, const Vec& z) {
  const int dim = static_cast<int>(z.size());
  if (dim < 1) throw ConfigError("base_function: empty input");
  switch (tag) {
    case BaseFn::bent_cigar: {
      // z1^2 + 1e6 * sum_{i>=2} zi^2
      double tail = 0.0;
      for (int i = 1; i < dim; ++i) tail += z[i] * z[i];
      return z[0] * z[0] + 1e6 * tail;
    }
    case BaseFn::zakharov: {
      // sum zi^2 + (sum 0.5*i*zi)^2 + (sum 0.5*i*zi)^4
      double sq = 0.0, lin = 0.0;
      for (int i = 0; i < dim; ++i) {
        sq += z[i] * z[i];
        lin += 0.5 * (i + 1) * z[i];
      }
      return sq + lin * lin + lin * lin * lin * lin;
    }
    case BaseFn::rosenbrock: {
      // Optimum moved to the origin: y = z + 1,
      // sum 100*(yi^2 - y_{i+1})^2 + (yi - 1)^2
      double f = 0.0;
      for (int i = 0; i + 1 < dim; ++i) {
        const double yi = z[i] + 1.0;
        const double yn = z[i + 1] + 1.0;
        const double a = yi * yi - yn;
        f += 100.0 * a * a + (yi - 1.0) * (yi - 1.0);
      }
      return f;
    }
    case BaseFn::rastrigin: {
      double f = 0.0;
      for (int i = 0; i < dim; ++i) {
        f += z[i] * z[i] - 10.0 * std::cos(2.0 * M_PI * z[i]) + 10.0;
      }
      return f;
    }
    case BaseFn::schaffer_f6: {
      // Expanded Schaffer F6 over consecutive pairs, wrapping around.
      double f = 0.0;
      for (int i = 0; i < dim; ++i) {
        f += schaffer_pair(z[i], z[(i + 1) % dim]);
      }
      return f;
    }
    case BaseFn::lunacek_bi_rastrigin: {
      if (dim < 2) throw ConfigError("lunacek_bi_rastrigin requires dim >= 2");
      // Optimum moved to the origin via y = z + mu0.
      const double mu0 = 2.5;
      const double d = 1.0;
      const double s = 1.0 - 1.0 / (2.0 * std::sqrt(dim + 20.0) - 8.2);
      const double mu1 = -std::sqrt((mu0 * mu0 - d) / s);
      double sphere0 = 0.0, sphere1 = 0.0, cosine = 0.0;
      for (int i = 0; i < dim; ++i) {
        const double y = z[i] + mu0;
        sphere0 += (y - mu0) * (y - mu0);
        sphere1 += (y - mu1) * (y - mu1);
        cosine += std::cos(2.0 * M_PI * (y - mu0));
      }
      return std::min(sphere0, d * dim + s * sphere1) + 10.0 * (dim - cosine);
    }
    case BaseFn::rastrigin_noncont: {
      double f = 0.0;
      for (int i = 0; i < dim; ++i) {
        const double y = std::abs(z[i]) <= 0.5 ? z[i] : std::round(2.0 * z[i]) / 2.0;
        f += y * y - 10.0 * std::cos(2.0 * M_PI * y) + 10.0;
      }
      return f;
    }
    case BaseFn::levy: {
      // w = 1 + z/4
      auto w = [&](int i) { return 1.0 + z[i] / 4.0; };
      const double s1 = std::sin(M_PI * w(0));
      double f = s1 * s1;
      for (int i = 0; i + 1 < dim; ++i) {
        const double wi = w(i);
        const double sw = std::sin(M_PI * wi + 1.0);
        f += (wi - 1.0) * (wi - 1.0) * (1.0 + 10.0 * sw * sw);
      }
      const double wd = w(dim - 1);
      const double sd = std::sin(2.0 * M_PI * wd);
      f += (wd - 1.0) * (wd - 1.0) * (1.0 + sd * sd);
      return f;
    }
    case BaseFn::schwefel: {
      // Optimum moved to the origin; each term vanishes exactly at z = 0.
      const double c = kSchwefelOpt * std::sin(std::sqrt(kSchwefelOpt));
      double f = 0.0;
      for (int i = 0; i < dim; ++i) {
        f += c - schwefel_term(z[i] + kSchwefelOpt, dim);
      }
      return f;
    }
  }
  throw ConfigError("base_function: unknown tag");
}

namespace {

struct BaseInfo {
  BaseFn tag;
  const char* name;
  double scale;   // maps [-100,100] onto the function's natural domain
  double lambda;  // composition magnitude normalizer
};

constexpr BaseInfo kBases[] = {
    {BaseFn::bent_cigar, "bent_cigar", 1.0, 1e-6},
    {BaseFn::zakharov, "zakharov", 1.0, 0.1},
    {BaseFn::rosenbrock, "rosenbrock", 2.048 / 100.0, 1.0},
    {BaseFn::rastrigin, "rastrigin", 5.12 / 100.0, 1.0},
    {BaseFn::schaffer_f6, "schaffer_f6", 1.0, 10.0},
    {BaseFn::lunacek_bi_rastrigin, "lunacek_bi_rastrigin", 10.0 / 100.0, 10.0},
    {BaseFn::rastrigin_noncont, "rastrigin_noncont", 5.12 / 100.0, 1.0},
    {BaseFn::levy, "levy", 5.12 / 100.0, 1.0},
    {BaseFn::schwefel, "schwefel", 1000.0 / 100.0, 0.5},
};

const BaseInfo& base_info(BaseFn tag) { return kBases[static_cast<int>(tag)]; }

// Dimension split proportions per hybrid part count (standard CEC splits).
const std::vector<double>& hybrid_proportions(int n_parts) {
  static const std::vector<std::vector<double>> table = {
      {},
      {},
      {},
      {0.3, 0.3, 0.4},
      {0.2, 0.2, 0.3, 0.3},
      {0.1, 0.2, 0.2, 0.2, 0.3},
      {0.1, 0.1, 0.2, 0.2, 0.2, 0.2},
  };
  return table[n_parts];
}

struct Recipe {
  InstanceKind kind;
  BaseFn base;  // shifted_rotated only
  int n_parts;  // hybrid / composition only
  double bias;
};

Recipe recipe_for(SuiteKind kind, int fid) {
  if (kind == SuiteKind::cec2017_like) {
    if (fid < 1 || fid > 29) {
      throw ConfigError("cec2017-like function id must be in 1..29");
    }
    if (fid <= 9) {
      // F1..F9 biases follow the renumbered table: 100, then 300..1000.
      const double bias = fid == 1 ? 100.0 : 100.0 * (fid + 1);
      return {InstanceKind::shifted_rotated, kBases[fid - 1].tag, 0, bias};
    }
    if (fid <= 19) {
      static constexpr int parts[] = {3, 3, 3, 4, 4, 4, 5, 5, 5, 6};
      return {InstanceKind::hybrid, BaseFn::bent_cigar, parts[fid - 10], 100.0 * (fid + 1)};
    }
    static constexpr int parts[] = {3, 3, 4, 4, 5, 5, 6, 6, 3, 3};
    return {InstanceKind::composition, BaseFn::bent_cigar, parts[fid - 20], 100.0 * (fid + 1)};
  }
  if (fid < 1 || fid > 12) {
    throw ConfigError("cec2022-like function id must be in 1..12");
  }
  static constexpr BaseFn basic[] = {BaseFn::zakharov, BaseFn::rosenbrock, BaseFn::schaffer_f6,
                                     BaseFn::rastrigin_noncont, BaseFn::levy};
  static constexpr double basic_bias[] = {300.0, 400.0, 600.0, 800.0, 900.0};
  if (fid <= 5) {
    return {InstanceKind::shifted_rotated, basic[fid - 1], 0, basic_bias[fid - 1]};
  }
  static constexpr int hybrid_parts[] = {3, 6, 5};
  static constexpr double hybrid_bias[] = {1800.0, 2000.0, 2200.0};
  if (fid <= 8) {
    return {InstanceKind::hybrid, BaseFn::bent_cigar, hybrid_parts[fid - 6], hybrid_bias[fid - 6]};
  }
  static constexpr int comp_parts[] = {5, 4, 5, 6};
  static constexpr double comp_bias[] = {2300.0, 2400.0, 2600.0, 2700.0};
  return {InstanceKind::composition, BaseFn::bent_cigar, comp_parts[fid - 9], comp_bias[fid - 9]};
}

Vec random_shift(int dim, RngStream& rng) {
  Vec shift(dim);
  for (int j = 0; j < dim; ++j) {
    shift[j] = rng.uniform(-80.0, 80.0);
  }
  return shift;
}

std::vector<int> random_permutation(int dim, RngStream& rng) {
  std::vector<int> perm(dim);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = dim - 1; i > 0; --i) {
    const auto k = static_cast<int>(rng.index(static_cast<std::size_t>(i) + 1));
    std::swap(perm[i], perm[k]);
  }
  return perm;
}

std::vector<int> chunk_sizes(int dim, int n_parts) {
  // Cumulative rounding keeps every chunk non-empty for dim >= 10.
  const std::vector<double>& props = hybrid_proportions(n_parts);
  std::vector<int> sizes(n_parts);
  int prev = 0;
  double cum = 0.0;
  for (int k = 0; k < n_parts; ++k) {
    cum += props[k];
    const int edge = k + 1 == n_parts ? dim : static_cast<int>(std::lround(cum * dim));
    sizes[k] = edge - prev;
    prev = edge;
  }
  return sizes;
}

}  // namespace

const char* base_name(BaseFn tag) { return base_info(tag).name; }

BaseFn base_from_name(const std::string& name) {
  for (const BaseInfo& info : kBases) {
    if (name == info.name) return info.tag;
  }
  throw ConfigError("unknown base function: " + name);
}

const char* suite_name(SuiteKind kind) {
  return kind == SuiteKind::cec2017_like ? "cec2017-like" : "cec2022-like";
}

SuiteKind suite_from_name(const std::string& name) {
  if (name == "cec2017-like") return SuiteKind::cec2017_like;
  if (name == "cec2022-like") return SuiteKind::cec2022_like;
  throw ConfigError("unknown suite: " + name);
}

int function_count(SuiteKind kind) {
  return kind == SuiteKind::cec2017_like ? 29 : 12;
}

std::string function_class(SuiteKind kind, int function_id) {
  recipe_for(kind, function_id);  // id validation
  if (kind == SuiteKind::cec2017_like) {
    if (function_id <= 2) return "unimodal";
    if (function_id <= 9) return "multimodal";
    if (function_id <= 19) return "hybrid";
    return "composition";
  }
  if (function_id == 1) return "unimodal";
  if (function_id <= 5) return "basic";
  if (function_id <= 8) return "hybrid";
  return "composition";
}

Mat random_rotation(int dim, RngStream& rng) {
  Mat gauss(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      gauss(i, j) = rng.normal();
    }
  }
  Eigen::HouseholderQR<Mat> qr(gauss);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

BenchmarkInstance make_instance(SuiteKind kind, int function_id, int dim, std::uint64_t seed) {
  const Recipe recipe = recipe_for(kind, function_id);
  if (dim < 2) {
    throw ConfigError("benchmark instances require dim >= 2");
  }
  if (recipe.kind != InstanceKind::shifted_rotated && dim < 10) {
    throw ConfigError("hybrid/composition instances require dim >= 10");
  }

  BenchmarkInstance inst;
  inst.suite = kind;
  inst.function_id = function_id;
  inst.dim = dim;
  inst.seed = seed;
  inst.bias = recipe.bias;
  inst.kind = recipe.kind;
  {
    std::ostringstream os;
    os << suite_name(kind) << "-F" << (function_id < 10 ? "0" : "") << function_id << "-d" << dim;
    inst.id = os.str();
  }

  RngStream rng = RngStream(seed)
                      .split(kind == SuiteKind::cec2017_like ? 2017 : 2022)
                      .split(static_cast<std::uint64_t>(function_id))
                      .split(static_cast<std::uint64_t>(dim));

  inst.shift = random_shift(dim, rng);
  inst.rotation = random_rotation(dim, rng);

  switch (recipe.kind) {
    case InstanceKind::shifted_rotated: {
      inst.base = recipe.base;
      inst.scale = base_info(recipe.base).scale;
      break;
    }
    case InstanceKind::hybrid: {
      inst.permutation = random_permutation(dim, rng);
      const std::vector<int> sizes = chunk_sizes(dim, recipe.n_parts);
      for (int k = 0; k < recipe.n_parts; ++k) {
        const BaseInfo& info = kBases[(function_id + k) % 9];
        inst.parts.push_back({info.tag, info.scale, sizes[k]});
      }
      break;
    }
    case InstanceKind::composition: {
      for (int k = 0; k < recipe.n_parts; ++k) {
        const BaseInfo& info = kBases[(function_id + k) % 9];
        CompositionPart part;
        part.base = info.tag;
        part.scale = info.scale;
        part.shift = k == 0 ? inst.shift : random_shift(dim, rng);
        part.rotation = k == 0 ? inst.rotation : random_rotation(dim, rng);
        part.sigma = 10.0 * (k + 1);
        part.lambda = info.lambda;
        part.delta_bias = 100.0 * k;
        inst.components.push_back(std::move(part));
      }
      break;
    }
  }
  return inst;
}

double BenchmarkInstance::evaluate(const Vec& x) const {
  switch (kind) {
    case InstanceKind::shifted_rotated: {
      const Vec z = scale * (rotation * (x - shift));
      return base_function(base, z) + bias;
    }
    case InstanceKind::hybrid: {
      const Vec z = rotation * (x - shift);
      double f = bias;
      int offset = 0;
      for (const HybridPart& part : parts) {
        Vec chunk(part.size);
        for (int t = 0; t < part.size; ++t) {
          chunk[t] = part.scale * z[permutation[offset + t]];
        }
        f += base_function(part.base, chunk);
        offset += part.size;
      }
      return f;
    }
    case InstanceKind::composition: {
      // Distance-based weights; an exact hit on a component optimum takes
      // the whole weight so the composed optimum value is exact.
      const std::size_t n = components.size();
      std::vector<double> w(n);
      double wsum = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double d2 = (x - components[k].shift).squaredNorm();
        if (d2 < 1e-24) {
          std::fill(w.begin(), w.end(), 0.0);
          w[k] = 1.0;
          wsum = 1.0;
          break;
        }
        w[k] = std::exp(-d2 / (2.0 * dim * components[k].sigma * components[k].sigma)) /
               std::sqrt(d2);
        wsum += w[k];
      }
      if (wsum <= 0.0) {
        // All weights underflowed (x far from every optimum): fall back to
        // the nearest component.
        std::size_t nearest = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) {
          const double d2 = (x - components[k].shift).squaredNorm();
          if (d2 < best) {
            best = d2;
            nearest = k;
          }
        }
        std::fill(w.begin(), w.end(), 0.0);
        w[nearest] = 1.0;
        wsum = 1.0;
      }
      double f = bias;
      for (std::size_t k = 0; k < n; ++k) {
        if (w[k] == 0.0) continue;
        const CompositionPart& part = components[k];
        const Vec z = part.scale * (part.rotation * (x - part.shift));
        f += (w[k] / wsum) * (part.lambda * base_function(part.base, z) + part.delta_bias);
      }
      return f;
    }
  }
  throw ConfigError("evaluate: unknown instance kind");
}

std::string BenchmarkInstance::manifest() const {
  std::ostringstream os;
  os << "{\"id\":\"" << id << "\",\"suite\":\"" << suite_name(suite) << "\",\"function\":"
     << function_id << ",\"dim\":" << dim << ",\"seed\":" << seed << ",\"bias\":" << bias << "}";
  return os.str();
}

}  // namespace rimeopt::suite

#include "rimeopt/constrained.hpp"

#include <cmath>

namespace rimeopt::constrained {

Objective penalized(const ConstrainedProblem& problem, double factor, double eq_tol) {
  if (!(factor > 0.0)) {
    throw ConfigError("penalized: factor must be positive");
  }
  // Capture by value so the objective stays valid past the registry's lifetime.
  return [problem, factor, eq_tol](const Vec& x) {
    double penalty = 0.0;
    for (const Objective& g : problem.inequality) {
      const double v = std::max(0.0, g(x));
      penalty += v * v;
    }
    for (const Objective& h : problem.equality) {
      const double v = std::max(0.0, std::abs(h(x)) - eq_tol);
      penalty += v * v;
    }
    return problem.objective(x) + factor * penalty;
  };
}

double max_violation(const ConstrainedProblem& problem, const Vec& x, double eq_tol) {
  double worst = 0.0;
  for (const Objective& g : problem.inequality) {
    worst = std::max(worst, g(x));
  }
  for (const Objective& h : problem.equality) {
    worst = std::max(worst, std::abs(h(x)) - eq_tol);
  }
  return std::max(worst, 0.0);
}

namespace {

SearchSpace box(std::initializer_list<double> lo, std::initializer_list<double> hi) {
  SearchSpace s;
  s.lower = Eigen::Map<const Vec>(lo.begin(), static_cast<Eigen::Index>(lo.size()));
  s.upper = Eigen::Map<const Vec>(hi.begin(), static_cast<Eigen::Index>(hi.size()));
  return s;
}

Vec vec(std::initializer_list<double> v) {
  return Eigen::Map<const Vec>(v.begin(), static_cast<Eigen::Index>(v.size()));
}

ConstrainedProblem tension_spring() {
  // x = (wire diameter, mean coil diameter, active coils)
  ConstrainedProblem p;
  p.name = "tension-compression-spring";
  p.bounds = box({0.05, 0.25, 2.0}, {2.0, 1.3, 15.0});
  p.objective = [](const Vec& x) { return (x[2] + 2.0) * x[1] * x[0] * x[0]; };
  p.inequality = {
      [](const Vec& x) { return 1.0 - x[1] * x[1] * x[1] * x[2] / (71785.0 * std::pow(x[0], 4)); },
      [](const Vec& x) {
        return (4.0 * x[1] * x[1] - x[0] * x[1]) /
                   (12566.0 * (x[1] * std::pow(x[0], 3) - std::pow(x[0], 4))) +
               1.0 / (5108.0 * x[0] * x[0]) - 1.0;
      },
      [](const Vec& x) { return 1.0 - 140.45 * x[0] / (x[1] * x[1] * x[2]); },
      [](const Vec& x) { return (x[0] + x[1]) / 1.5 - 1.0; },
  };
  p.feasible_witness = vec({0.06, 0.5, 10.0});
  return p;
}

ConstrainedProblem pressure_vessel() {
  // x = (shell thickness, head thickness, inner radius, shell length)
  ConstrainedProblem p;
  p.name = "pressure-vessel";
  p.bounds = box({0.0, 0.0, 10.0, 10.0}, {99.0, 99.0, 200.0, 200.0});
  p.objective = [](const Vec& x) {
    return 0.6224 * x[0] * x[2] * x[3] + 1.7781 * x[1] * x[2] * x[2] +
           3.1661 * x[0] * x[0] * x[3] + 19.84 * x[0] * x[0] * x[2];
  };
  p.inequality = {
      [](const Vec& x) { return -x[0] + 0.0193 * x[2]; },
      [](const Vec& x) { return -x[1] + 0.00954 * x[2]; },
      [](const Vec& x) {
        return -M_PI * x[2] * x[2] * x[3] - 4.0 / 3.0 * M_PI * std::pow(x[2], 3) + 1296000.0;
      },
      [](const Vec& x) { return x[3] - 240.0; },
  };
  p.feasible_witness = vec({1.0, 0.5, 45.0, 160.0});
  return p;
}

ConstrainedProblem three_bar_truss() {
  ConstrainedProblem p;
  p.name = "three-bar-truss";
  p.bounds = box({0.0, 0.0}, {1.0, 1.0});
  constexpr double kLength = 100.0;
  constexpr double kLoad = 2.0;
  constexpr double kStress = 2.0;
  const double rt2 = std::sqrt(2.0);
  p.objective = [rt2](const Vec& x) { return (2.0 * rt2 * x[0] + x[1]) * kLength; };
  p.inequality = {
      [rt2](const Vec& x) {
        return (rt2 * x[0] + x[1]) / (rt2 * x[0] * x[0] + 2.0 * x[0] * x[1]) * kLoad - kStress;
      },
      [rt2](const Vec& x) {
        return x[1] / (rt2 * x[0] * x[0] + 2.0 * x[0] * x[1]) * kLoad - kStress;
      },
      [rt2](const Vec& x) { return 1.0 / (rt2 * x[1] + x[0]) * kLoad - kStress; },
  };
  p.feasible_witness = vec({0.8, 0.45});
  return p;
}

ConstrainedProblem welded_beam() {
  // x = (weld thickness h, weld length l, bar height t, bar thickness b)
  ConstrainedProblem p;
  p.name = "welded-beam";
  p.bounds = box({0.1, 0.1, 0.1, 0.1}, {2.0, 10.0, 10.0, 2.0});
  constexpr double kP = 6000.0;
  constexpr double kL = 14.0;
  constexpr double kE = 30e6;
  constexpr double kG = 12e6;
  constexpr double kTauMax = 13600.0;
  constexpr double kSigmaMax = 30000.0;
  constexpr double kDeltaMax = 0.25;

  auto shear = [](const Vec& x) {
    const double tau1 = kP / (std::sqrt(2.0) * x[0] * x[1]);
    const double m = kP * (kL + x[1] / 2.0);
    const double r =
        std::sqrt(x[1] * x[1] / 4.0 + (x[0] + x[2]) * (x[0] + x[2]) / 4.0);
    const double j = 2.0 * (std::sqrt(2.0) * x[0] * x[1] *
                            (x[1] * x[1] / 12.0 + (x[0] + x[2]) * (x[0] + x[2]) / 4.0));
    const double tau2 = m * r / j;
    return std::sqrt(tau1 * tau1 + 2.0 * tau1 * tau2 * x[1] / (2.0 * r) + tau2 * tau2);
  };
  auto bending = [](const Vec& x) { return 6.0 * kP * kL / (x[3] * x[2] * x[2]); };
  auto deflection = [](const Vec& x) {
    return 4.0 * kP * std::pow(kL, 3) / (kE * std::pow(x[2], 3) * x[3]);
  };
  auto buckling = [](const Vec& x) {
    return 4.013 * kE * std::sqrt(x[2] * x[2] * std::pow(x[3], 6) / 36.0) / (kL * kL) *
           (1.0 - x[2] / (2.0 * kL) * std::sqrt(kE / (4.0 * kG)));
  };

  p.objective = [](const Vec& x) {
    return 1.10471 * x[0] * x[0] * x[1] + 0.04811 * x[2] * x[3] * (14.0 + x[1]);
  };
  p.inequality = {
      [shear](const Vec& x) { return shear(x) - kTauMax; },
      [bending](const Vec& x) { return bending(x) - kSigmaMax; },
      [](const Vec& x) { return x[0] - x[3]; },
      [](const Vec& x) {
        return 0.10471 * x[0] * x[0] + 0.04811 * x[2] * x[3] * (14.0 + x[1]) - 5.0;
      },
      [](const Vec& x) { return 0.125 - x[0]; },
      [deflection](const Vec& x) { return deflection(x) - kDeltaMax; },
      [buckling](const Vec& x) { return kP - buckling(x); },
  };
  p.feasible_witness = vec({0.3, 4.0, 9.0, 0.3});
  return p;
}

ConstrainedProblem gear_train() {
  // Teeth counts are physically integral; decision variables are rounded to
  // the nearest integer before evaluation, matching the classic discrete
  // optimum 2.7009e-12 at (43, 16, 19, 49) up to permutation.
  ConstrainedProblem p;
  p.name = "gear-train";
  p.bounds = box({12.0, 12.0, 12.0, 12.0}, {60.0, 60.0, 60.0, 60.0});
  p.objective = [](const Vec& x) {
    const double ratio = (std::round(x[0]) * std::round(x[1])) /
                         (std::round(x[2]) * std::round(x[3]));
    const double err = 1.0 / 6.931 - ratio;
    return err * err;
  };
  p.feasible_witness = vec({16.0, 19.0, 43.0, 49.0});
  return p;
}

}  // namespace

std::vector<ConstrainedProblem> problem_registry() {
  std::vector<ConstrainedProblem> problems;
  problems.push_back(tension_spring());
  problems.push_back(pressure_vessel());
  problems.push_back(three_bar_truss());
  problems.push_back(welded_beam());
  problems.push_back(gear_train());
  return problems;
}

ConstrainedProblem problem_by_name(const std::string& name) {
  for (ConstrainedProblem& p : problem_registry()) {
    if (p.name == name) return std::move(p);
  }
  throw ConfigError("unknown constrained problem: " + name);
}

}  // namespace rimeopt::constrained

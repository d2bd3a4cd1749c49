#pragma once

#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chainlab/metric.hpp"

namespace chainlab {

inline constexpr double kExcluded = std::numeric_limits<double>::infinity();

/// Finite ground set with penalty f and power q. The K-functional is
/// K(t,x) = min_y f(y) + t^q d(x,y)^q; q = 1 is the linear variant.
/// Points with penalty kExcluded are not candidates.
struct InterpolationProblem {
  const FiniteMetricSpace* ground = nullptr;
  std::vector<double> penalty;
  double q = 1.0;
  std::vector<PointIndex> target;

  InterpolationProblem() = default;
  InterpolationProblem(const FiniteMetricSpace& space, std::vector<double> f, double power,
                       std::vector<PointIndex> t);
};

struct KValue {
  double value = 0.0;
  PointIndex minimizer = 0;
};

/// Exact minimum over the ground set. Ties prefer y = x, then the lowest index.
KValue k_functional(const InterpolationProblem& prob, double t, PointIndex x);

/// K_t = {pi_t(x) : x in T}, sorted and deduplicated.
std::vector<PointIndex> interpolation_set(const InterpolationProblem& prob, double t);

struct TelescopingReport {
  std::vector<double> sums;    ///< S(x), one per target point
  std::vector<double> ratios;  ///< S(x) * constant / f(x); 0 when S(x) = f(x) = 0
  double constant = 0.0;       ///< a(1-2^{-1/alpha}) for q = 1, a^q(1-2^{-q/alpha}) otherwise
  double max_ratio = 0.0;
  int n_max = 0;
};

/// S(x) = sum_{n<=n_max} (2^{n/alpha} d(x, pi_{a 2^{n/alpha}}(x)))^q. The
/// telescoping argument gives S(x) * constant <= f(x), i.e. every ratio <= 1.
TelescopingReport telescoping_check(const InterpolationProblem& prob, double alpha, double a, int n_max);

struct ProjectionReport {
  bool sublevel = true;          ///< T = {x : f(x) <= u}
  bool idempotent = true;        ///< pi_t(pi_t(x)) = pi_t(x) for x in T
  bool inside_target = true;     ///< K_t subset of T
  bool fixed_points_match = true;  ///< K_t = {x in T : K(t,x) = f(x)}
  std::vector<PointIndex> k_t;
  std::string problem;

  bool ok() const { return sublevel && idempotent && inside_target && fixed_points_match; }
};

/// Checks projection properties of pi_t on a sublevel-set target (q = 1).
ProjectionReport projection_check(const InterpolationProblem& prob, double t, double u);

struct EllipsoidProjection {
  Eigen::VectorXd pi;        ///< (pi_t(x))_k = t^2 x_k / (t^2 + k)
  Eigen::VectorXd weights;   ///< ((t^2 + k)/t^2)^2 k; +inf at t = 0
  Eigen::VectorXd residual;  ///< gradient 2k pi_k - 2t^2 (x_k - pi_k)
  bool weights_infinite = false;
};

/// Closed-form minimizer of sum_k k y_k^2 + t^2 |x - y|^2, k = 1..d.
EllipsoidProjection ellipsoid_closed_form(double t, const Eigen::VectorXd& x);

}  // namespace chainlab

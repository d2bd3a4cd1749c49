#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chainlab/interpolation.hpp"
#include "chainlab/metric.hpp"

namespace chainlab {

/// Gauge ||.||_T of a symmetric convex body. Weighted l_r gauges
/// (sum_i w_i |x_i|^r)^{1/r} (r = inf: max_i w_i |x_i|) are lattice
/// gauges; custom gauges declare whether they are.
class Gauge {
 public:
  using Evaluator = std::function<double(const Eigen::VectorXd&)>;

  static Gauge weighted_lp(std::vector<double> weights, double r);
  /// sum_k w_k x_k^2 under a square root.
  static Gauge ellipsoid(std::vector<double> weights) { return weighted_lp(std::move(weights), 2.0); }
  static Gauge custom(Evaluator f, int dim, bool lattice);

  double operator()(const Eigen::VectorXd& x) const;
  int dim() const { return dim_; }
  bool lattice() const { return lattice_; }
  bool is_weighted_lp() const { return !custom_; }
  double exponent() const { return r_; }
  const std::vector<double>& weights() const { return weights_; }

  /// Lower q-estimate constant of a weighted l_r gauge: 1 when q >= r,
  /// otherwise d^{1/q - 1/r} (d disjoint coordinate blocks attain it).
  std::optional<double> analytic_lower_q(double q) const;

 private:
  std::vector<double> weights_;
  double r_ = 2.0;
  Evaluator custom_;
  int dim_ = 0;
  bool lattice_ = true;
};

/// Distance matrix ||x_i - x_j|| of the coordinates under the gauge.
FiniteMetricSpace gauge_space(const Eigen::MatrixXd& coords, const Gauge& gauge);

/// u = (y ^ z) v 0 + (y v z) ^ 0, coordinatewise.
Eigen::VectorXd lattice_split_point(const Eigen::VectorXd& y, const Eigen::VectorXd& z);

inline constexpr int kRenormExactDim = 12;

struct RenormResult {
  double value = 0.0;
  bool exact = true;  ///< false: sampled lower estimate
  std::size_t decompositions = 0;
};

/// ||x||_~ = sup over decompositions of supp(x) into disjoint blocks of
/// [sum ||x_B||^q]^{1/q}. Exact enumeration when |supp(x)| <= 12, otherwise
/// the max over `samples` uniformly random set partitions (a lower estimate).
RenormResult renorm_lower_q(const Gauge& gauge, double q, const Eigen::VectorXd& x, std::size_t samples = 4096,
                            std::uint64_t seed = 0);

/// Uniform random set partition of {0..m-1} as block labels (Stam's urn method).
std::vector<int> random_set_partition(std::size_t m, std::uint64_t seed, std::uint64_t index);

enum class GeometryMode { kLowerQ, kQConvex, kGeomCondition };

struct GeometryEstimate {
  GeometryMode mode = GeometryMode::kLowerQ;
  double value = 0.0;
  std::size_t used = 0;
  std::size_t skipped = 0;  ///< degenerate samples
};

/// lower_q: max over random disjoint families of [sum ||x_i||^q]^{1/q} / ||sum |x_i|||
/// (a lower estimate of M). q_convex: min over random unit pairs of
/// (1 - ||(x+y)/2||) / ||x-y||^q (an upper estimate of eta). Sample i draws
/// from block_rng(seed, i), so the result is independent of the worker count.
GeometryEstimate estimate_lower_q(const Gauge& gauge, double q, std::size_t samples, std::uint64_t seed);
GeometryEstimate estimate_q_convex(const Gauge& gauge, double q, std::size_t samples, std::uint64_t seed);

/// max over t in `ts` and distinct y, z in K_t of ||y-z||_T^q / (t ||y-z||),
/// a lower estimate of L. The problem's ground space must carry coordinates.
GeometryEstimate estimate_geom_condition(const InterpolationProblem& prob, const Gauge& gauge, double q,
                                         const std::vector<double>& ts);

const char* to_string(GeometryMode m);

}  // namespace chainlab

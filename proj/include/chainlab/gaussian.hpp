#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "chainlab/bounds.hpp"
#include "chainlab/metric.hpp"
#include "chainlab/parallel.hpp"

namespace chainlab {

/// Centered Gaussian process on a finite index set, given by its covariance.
class GaussianProcess {
 public:
  /// Validates symmetry and positive semidefiniteness: eigenvalues below
  /// -1e-10 max(1, lambda_max) are rejected, smaller negatives clipped to 0.
  explicit GaussianProcess(Eigen::MatrixXd cov);

  /// Covariance = Gram matrix of the given points (one per row).
  static GaussianProcess from_points(const Eigen::MatrixXd& points);

  std::size_t size() const { return static_cast<std::size_t>(cov_.rows()); }
  const Eigen::MatrixXd& cov() const { return cov_; }
  /// Rows are the points' coordinates in a factorization cov = F F^T.
  const Eigen::MatrixXd& factor() const { return factor_; }

  /// d(x,y) = (S_xx + S_yy - 2 S_xy)^{1/2}, negative radicands clipped to 0.
  FiniteMetricSpace natural_metric() const;

 private:
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd factor_;
};

/// Monte Carlo draws of the process: `samples` rows, one column per index.
/// Block b of 256 samples comes from block_rng(seed, b), so every subset
/// and every estimate reuses the same common random numbers.
class ProcessSamples {
 public:
  ProcessSamples(const GaussianProcess& process, std::size_t samples, std::uint64_t seed,
                 Execution exec = Execution::kParallel);

  std::size_t samples() const { return static_cast<std::size_t>(draws_.rows()); }
  std::uint64_t seed() const { return seed_; }
  const Eigen::MatrixXd& draws() const { return draws_; }

 private:
  Eigen::MatrixXd draws_;
  std::uint64_t seed_;
};

struct McEstimate {
  double mean = 0.0;
  double se = 0.0;
  std::size_t samples = 0;
};

/// Mean and standard error of a per-sample vector; sums run in sample order.
McEstimate summarize(const std::vector<double>& values);

/// G(A) = E max_{x in A} X_x estimated on the common sample.
McEstimate mc_sup(const ProcessSamples& draws, const std::vector<PointIndex>& a);

/// Convenience overload drawing a fresh sample (samples >= 1000).
McEstimate mc_sup(const GaussianProcess& process, const std::vector<PointIndex>& a, std::size_t samples,
                  std::uint64_t seed);

/// G(B(x,s)) for every radius s in {0} u {d(x,y)}: one table per point.
struct BallWidths {
  PointIndex center = 0;
  std::vector<double> radii;  ///< ascending, radii[0] = 0
  std::vector<double> width;  ///< estimated G(B(x, radii[j]))
  std::vector<double> se;
};

/// Ball widths for every point: sort by distance to x, then one pass of
/// running maxima per sample gives all radii at once.
std::vector<BallWidths> ball_widths(const FiniteMetricSpace& metric, const ProcessSamples& draws,
                                    Execution exec = Execution::kParallel);

struct BallK {
  double value = 0.0;   ///< K(t,x) = min_s t s + G(T) - G(B(x,s))
  double radius = 0.0;  ///< s(t,x), lowest minimizing radius
};

/// Exact minimum over the cached radii; G(T) is the table's widest ball.
BallK ball_k_functional(double t, const BallWidths& table);

struct MmPipelineResult {
  BoundReport report;             ///< witness gamma_2 value
  McEstimate g_total;             ///< G(T)
  double telescoping_ratio = 0.0; ///< max_x a(1-2^{-1/2}) sum_n 2^{n/2} s_n(x) / (G(T) - G({x}))
  bool low_confidence = false;    ///< SE above 10% of G(T)
};

/// Majorizing-measure pipeline: s_n(x) = s(a 2^{n/2}, x), controls
/// ((a+1) s_n, c a), alpha = 2, p = 1.
MmPipelineResult mm_pipeline(const GaussianProcess& process, double a, std::size_t samples, std::uint64_t seed,
                             double c = 1.0);

struct MinorationGap {
  double gap = 0.0;  ///< negative means the inequality holds
  double min_ball = 0.0;
  double union_width = 0.0;
  double log_n = 0.0;
};

/// min_i G(B(x_i,sigma)) + c1 b sqrt(log n) - G(u_i B(x_i,sigma)) - c2 sigma sqrt(log n).
/// The points must be pairwise at least b apart.
MinorationGap sudakov_minoration_gap(const FiniteMetricSpace& metric, const ProcessSamples& draws,
                                     const std::vector<PointIndex>& points, double sigma, double b, double c1,
                                     double c2);

}  // namespace chainlab

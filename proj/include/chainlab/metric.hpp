#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace chainlab {

/// Thrown for malformed inputs (dimension mismatch, invalid weights, ...).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using PointIndex = int;

namespace norms {
struct Euclidean {};
struct L1 {};
struct LInf {};
struct WeightedL2 {
  std::vector<double> weights;
};
/// A precomputed symmetric distance matrix; coordinates are ignored.
struct Matrix {
  Eigen::MatrixXd dist;
};
}  // namespace norms

using NormSpec = std::variant<norms::Euclidean, norms::L1, norms::LInf, norms::WeightedL2, norms::Matrix>;

/// Finite (quasi-)metric space with a dense distance matrix.
///
/// Immutable after construction. `quasi_constant` is the kappa in
/// d(i,j) <= kappa (d(i,k) + d(k,j)); it is 1 for genuine metrics.
class FiniteMetricSpace {
 public:
  FiniteMetricSpace() = default;
  FiniteMetricSpace(Eigen::MatrixXd dist, double quasi_constant = 1.0,
                    Eigen::MatrixXd coords = {}, std::vector<std::string> ids = {});

  std::size_t size() const { return static_cast<std::size_t>(dist_.rows()); }
  double operator()(PointIndex i, PointIndex j) const { return dist_(i, j); }
  const Eigen::MatrixXd& distances() const { return dist_; }
  double quasi_constant() const { return quasi_constant_; }

  bool has_coords() const { return coords_.rows() > 0; }
  /// Row i holds the coordinates of point i.
  const Eigen::MatrixXd& coords() const { return coords_; }
  const std::vector<std::string>& ids() const { return ids_; }

 private:
  Eigen::MatrixXd dist_;
  double quasi_constant_ = 1.0;
  Eigen::MatrixXd coords_;
  std::vector<std::string> ids_;
};

/// A subset of the points of a space, stored as sorted distinct indices.
class SubsetView {
 public:
  SubsetView() = default;
  /// Validates indices against the space and sorts them; throws InputError
  /// on duplicates or out-of-range entries.
  SubsetView(const FiniteMetricSpace& space, std::vector<PointIndex> indices);

  static SubsetView all(const FiniteMetricSpace& space);
  static SubsetView empty(const FiniteMetricSpace& space);

  const FiniteMetricSpace& space() const { return *space_; }
  std::span<const PointIndex> indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  PointIndex operator[](std::size_t k) const { return indices_[k]; }
  bool contains(PointIndex i) const;

 private:
  const FiniteMetricSpace* space_ = nullptr;
  std::vector<PointIndex> indices_;
};

/// Builds the space of `coords` (one row per point) under the given norm.
FiniteMetricSpace build_space(const Eigen::MatrixXd& coords, const NormSpec& norm);

struct Triple {
  PointIndex i, j, k;
  friend bool operator==(const Triple&, const Triple&) = default;
};

/// Every (i,j,k) with d(i,j) > kappa (d(i,k) + d(k,j)) (1 + rel_slack). The
/// default slack absorbs rounding on collinear points; pass 0 for exact comparisons.
std::vector<Triple> check_metric(const FiniteMetricSpace& space, double kappa, double rel_slack = 1e-12);

double diam(const SubsetView& a);
double diam(const FiniteMetricSpace& space, std::span<const PointIndex> points);

/// min over x in A of max over y in A of d(x,y); 0 for empty sets.
double center_radius(const FiniteMetricSpace& space, std::span<const PointIndex> points);

/// Distance from x to the nearest point of `net` (+inf for an empty net).
double dist_to_set(const FiniteMetricSpace& space, PointIndex x, std::span<const PointIndex> net);

}  // namespace chainlab

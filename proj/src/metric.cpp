#include "chainlab/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chainlab {

FiniteMetricSpace::FiniteMetricSpace(Eigen::MatrixXd dist, double quasi_constant, Eigen::MatrixXd coords,
                                     std::vector<std::string> ids)
    : dist_(std::move(dist)), quasi_constant_(quasi_constant), coords_(std::move(coords)), ids_(std::move(ids)) {
  if (dist_.rows() != dist_.cols()) throw InputError("distance matrix must be square");
  if (quasi_constant_ < 1.0) throw InputError("quasi_constant must be >= 1");
  if (coords_.rows() != 0 && coords_.rows() != dist_.rows())
    throw InputError("coordinate rows do not match the number of points");
  const auto n = dist_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (dist_(i, i) != 0.0) throw InputError("distance matrix must have a zero diagonal");
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = dist_(i, j);
      if (!std::isfinite(v) || v < 0.0) throw InputError("distances must be finite and nonnegative");
      if (v != dist_(j, i)) throw InputError("distance matrix must be symmetric");
    }
  }
  if (ids_.empty()) {
    ids_.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) ids_.push_back(std::to_string(i));
  } else if (static_cast<Eigen::Index>(ids_.size()) != n) {
    throw InputError("point id count does not match the number of points");
  }
}

SubsetView::SubsetView(const FiniteMetricSpace& space, std::vector<PointIndex> indices)
    : space_(&space), indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end())
    throw InputError("subset indices must be distinct");
  const auto n = static_cast<PointIndex>(space.size());
  for (PointIndex i : indices_)
    if (i < 0 || i >= n) throw InputError("subset index " + std::to_string(i) + " out of range");
}

SubsetView SubsetView::all(const FiniteMetricSpace& space) {
  std::vector<PointIndex> idx(space.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<PointIndex>(i);
  return SubsetView(space, std::move(idx));
}

SubsetView SubsetView::empty(const FiniteMetricSpace& space) { return SubsetView(space, {}); }

bool SubsetView::contains(PointIndex i) const {
  return std::binary_search(indices_.begin(), indices_.end(), i);
}

namespace {

struct DistanceVisitor {
  const Eigen::MatrixXd& coords;

  Eigen::MatrixXd fill(auto&& metric) const {
    const auto n = coords.rows();
    Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const Eigen::VectorXd diff = (coords.row(i) - coords.row(j)).transpose();
        dist(i, j) = dist(j, i) = metric(diff);
      }
    return dist;
  }

  Eigen::MatrixXd operator()(const norms::Euclidean&) const {
    return fill([](const Eigen::VectorXd& v) { return v.norm(); });
  }
  Eigen::MatrixXd operator()(const norms::L1&) const {
    return fill([](const Eigen::VectorXd& v) { return v.lpNorm<1>(); });
  }
  Eigen::MatrixXd operator()(const norms::LInf&) const {
    return fill([](const Eigen::VectorXd& v) { return v.lpNorm<Eigen::Infinity>(); });
  }
  Eigen::MatrixXd operator()(const norms::WeightedL2& w) const {
    if (static_cast<Eigen::Index>(w.weights.size()) != coords.cols())
      throw InputError("weighted_l2 weight count does not match the dimension");
    for (double x : w.weights)
      if (!(x >= 0.0) || !std::isfinite(x)) throw InputError("weighted_l2 weights must be nonnegative");
    const Eigen::Map<const Eigen::VectorXd> weights(w.weights.data(), static_cast<Eigen::Index>(w.weights.size()));
    return fill([&](const Eigen::VectorXd& v) { return std::sqrt((weights.array() * v.array().square()).sum()); });
  }
  Eigen::MatrixXd operator()(const norms::Matrix& m) const { return m.dist; }
};

}  // namespace

FiniteMetricSpace build_space(const Eigen::MatrixXd& coords, const NormSpec& norm) {
  if (std::holds_alternative<norms::Matrix>(norm)) {
    const auto& m = std::get<norms::Matrix>(norm).dist;
    if (m.rows() == 0) throw InputError("custom distance matrix is empty");
    return FiniteMetricSpace(m, 1.0, coords.rows() == m.rows() ? coords : Eigen::MatrixXd{});
  }
  if (coords.rows() == 0) throw InputError("point set is empty");
  for (Eigen::Index i = 0; i < coords.rows(); ++i)
    for (Eigen::Index j = 0; j < coords.cols(); ++j)
      if (!std::isfinite(coords(i, j))) throw InputError("coordinates must be finite");
  return FiniteMetricSpace(std::visit(DistanceVisitor{coords}, norm), 1.0, coords);
}

std::vector<Triple> check_metric(const FiniteMetricSpace& space, double kappa, double rel_slack) {
  std::vector<Triple> out;
  const auto n = static_cast<PointIndex>(space.size());
  const double scale = kappa * (1.0 + rel_slack);
  for (PointIndex i = 0; i < n; ++i)
    for (PointIndex j = 0; j < n; ++j)
      for (PointIndex k = 0; k < n; ++k)
        if (space(i, j) > scale * (space(i, k) + space(k, j))) out.push_back({i, j, k});
  return out;
}

double diam(const FiniteMetricSpace& space, std::span<const PointIndex> points) {
  double d = 0.0;
  for (std::size_t a = 0; a < points.size(); ++a)
    for (std::size_t b = a + 1; b < points.size(); ++b) d = std::max(d, space(points[a], points[b]));
  return d;
}

double diam(const SubsetView& a) { return a.empty() ? 0.0 : diam(a.space(), a.indices()); }

double center_radius(const FiniteMetricSpace& space, std::span<const PointIndex> points) {
  if (points.empty()) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (PointIndex x : points) {
    double r = 0.0;
    for (PointIndex y : points) r = std::max(r, space(x, y));
    best = std::min(best, r);
  }
  return best;
}

double dist_to_set(const FiniteMetricSpace& space, PointIndex x, std::span<const PointIndex> net) {
  double d = std::numeric_limits<double>::infinity();
  for (PointIndex s : net) d = std::min(d, space(x, s));
  return d;
}

}  // namespace chainlab

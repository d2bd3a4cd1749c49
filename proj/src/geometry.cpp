#include "chainlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chainlab/parallel.hpp"
#include "chainlab/rng.hpp"

namespace chainlab {

Gauge Gauge::weighted_lp(std::vector<double> weights, double r) {
  if (weights.empty()) throw InputError("gauge weights are empty");
  if (!(r >= 1.0)) throw InputError("gauge exponent r must be >= 1");
  for (double w : weights)
    if (!(w > 0.0) || !std::isfinite(w)) throw InputError("gauge weights must be positive and finite");
  Gauge g;
  g.weights_ = std::move(weights);
  g.r_ = r;
  g.dim_ = static_cast<int>(g.weights_.size());
  g.lattice_ = true;
  return g;
}

Gauge Gauge::custom(Evaluator f, int dim, bool lattice) {
  if (!f) throw InputError("custom gauge needs an evaluator");
  if (dim <= 0) throw InputError("gauge dimension must be positive");
  Gauge g;
  g.custom_ = std::move(f);
  g.dim_ = dim;
  g.lattice_ = lattice;
  return g;
}

double Gauge::operator()(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) throw InputError("gauge dimension mismatch");
  if (custom_) return custom_(x);
  if (std::isinf(r_)) {
    double m = 0.0;
    for (int i = 0; i < dim_; ++i) m = std::max(m, weights_[static_cast<std::size_t>(i)] * std::abs(x(i)));
    return m;
  }
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) s += weights_[static_cast<std::size_t>(i)] * std::pow(std::abs(x(i)), r_);
  return r_ == 1.0 ? s : std::pow(s, 1.0 / r_);
}

std::optional<double> Gauge::analytic_lower_q(double q) const {
  if (custom_) return std::nullopt;
  if (q >= r_) return 1.0;
  const double inv_r = std::isinf(r_) ? 0.0 : 1.0 / r_;
  return std::pow(static_cast<double>(dim_), 1.0 / q - inv_r);
}

FiniteMetricSpace gauge_space(const Eigen::MatrixXd& coords, const Gauge& gauge) {
  if (coords.rows() == 0) throw InputError("point set is empty");
  if (coords.cols() != gauge.dim()) throw InputError("gauge dimension does not match the coordinates");
  const auto n = coords.rows();
  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      dist(i, j) = dist(j, i) = gauge((coords.row(i) - coords.row(j)).transpose());
  return FiniteMetricSpace(std::move(dist), 1.0, coords);
}

Eigen::VectorXd lattice_split_point(const Eigen::VectorXd& y, const Eigen::VectorXd& z) {
  if (y.size() != z.size()) throw InputError("lattice_split_point: dimension mismatch");
  Eigen::VectorXd u(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i)
    u(i) = std::max(std::min(y(i), z(i)), 0.0) + std::min(std::max(y(i), z(i)), 0.0);
  return u;
}

namespace {

/// Calls body(labels, blocks) for every restricted growth string of length m.
template <typename F>
void for_each_set_partition(std::size_t m, F&& body) {
  std::vector<int> rgs(m, 0);
  if (m == 0) return;
  while (true) {
    body(rgs, *std::max_element(rgs.begin(), rgs.end()) + 1);
    std::size_t i = m - 1;
    for (; i > 0; --i) {
      int prefix_max = 0;
      for (std::size_t j = 0; j < i; ++j) prefix_max = std::max(prefix_max, rgs[j]);
      if (rgs[i] <= prefix_max) {
        ++rgs[i];
        std::fill(rgs.begin() + static_cast<long>(i) + 1, rgs.end(), 0);
        break;
      }
    }
    if (i == 0) return;
  }
}

double bell_number(std::size_t m) {
  // Bell triangle
  std::vector<double> row{1.0};
  for (std::size_t i = 1; i <= m; ++i) {
    std::vector<double> next{row.back()};
    for (double v : row) next.push_back(next.back() + v);
    row = std::move(next);
  }
  return row.front();
}

std::vector<int> stam_partition(std::size_t m, Rng& rng) {
  if (m == 0) return {};
  const double log_bell = std::log(bell_number(m));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  // P(K = k) = k^m / (e B_m k!)
  double cumulative = 0.0;
  int k = 1;
  for (;; ++k) {
    cumulative += std::exp(static_cast<double>(m) * std::log(k) - 1.0 - log_bell - std::lgamma(k + 1.0));
    if (cumulative >= u || k > 4 * static_cast<int>(m) + 64) break;
  }
  std::uniform_int_distribution<int> urn(0, k - 1);
  std::vector<int> raw(m);
  for (auto& v : raw) v = urn(rng);
  // relabel by first occurrence
  std::vector<int> label(static_cast<std::size_t>(k), -1);
  int next = 0;
  for (auto& v : raw) {
    auto& l = label[static_cast<std::size_t>(v)];
    if (l < 0) l = next++;
    v = l;
  }
  return raw;
}

double block_sum(const Gauge& gauge, double q, const Eigen::VectorXd& x, const std::vector<Eigen::Index>& support,
                 const std::vector<int>& labels, int blocks) {
  double s = 0.0;
  for (int b = 0; b < blocks; ++b) {
    Eigen::VectorXd part = Eigen::VectorXd::Zero(x.size());
    for (std::size_t i = 0; i < support.size(); ++i)
      if (labels[i] == b) part(support[i]) = x(support[i]);
    s += std::pow(gauge(part), q);
  }
  return std::pow(s, 1.0 / q);
}

Eigen::VectorXd gaussian_vector(int dim, Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v(i) = normal(rng);
  return v;
}

}  // namespace

std::vector<int> random_set_partition(std::size_t m, std::uint64_t seed, std::uint64_t index) {
  Rng rng = block_rng(seed, index);
  return stam_partition(m, rng);
}

RenormResult renorm_lower_q(const Gauge& gauge, double q, const Eigen::VectorXd& x, std::size_t samples,
                            std::uint64_t seed) {
  if (!gauge.lattice()) throw InputError("renorm_lower_q requires a lattice gauge");
  if (!(q >= 1.0)) throw InputError("q must be >= 1");
  if (x.size() != gauge.dim()) throw InputError("renorm_lower_q: dimension mismatch");
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x(i) != 0.0) support.push_back(i);
  RenormResult out;
  if (support.empty()) return out;
  if (support.size() <= static_cast<std::size_t>(kRenormExactDim)) {
    for_each_set_partition(support.size(), [&](const std::vector<int>& labels, int blocks) {
      out.value = std::max(out.value, block_sum(gauge, q, x, support, labels, blocks));
      ++out.decompositions;
    });
    return out;
  }
  out.exact = false;
  std::vector<double> values(samples, 0.0);
  for_each_index(samples, Execution::kParallel, [&](std::size_t i) {
    Rng rng = block_rng(seed, i);
    const auto labels = stam_partition(support.size(), rng);
    values[i] = block_sum(gauge, q, x, support, labels, *std::max_element(labels.begin(), labels.end()) + 1);
  });
  // the trivial decomposition is always available
  out.value = gauge(x);
  for (double v : values) out.value = std::max(out.value, v);
  out.decompositions = samples + 1;
  return out;
}

GeometryEstimate estimate_lower_q(const Gauge& gauge, double q, std::size_t samples, std::uint64_t seed) {
  if (!gauge.lattice()) throw InputError("lower-q estimate requires a lattice gauge");
  if (!(q >= 1.0)) throw InputError("q must be >= 1");
  const int d = gauge.dim();
  std::vector<double> ratio(samples, std::numeric_limits<double>::quiet_NaN());
  std::vector<Eigen::Index> all(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) all[static_cast<std::size_t>(i)] = i;
  for_each_index(samples, Execution::kParallel, [&](std::size_t i) {
    Rng rng = block_rng(seed, i);
    const Eigen::VectorXd x = gaussian_vector(d, rng);
    const auto labels = stam_partition(static_cast<std::size_t>(d), rng);
    const double denom = gauge(x.cwiseAbs());
    if (denom > 0.0)
      ratio[i] = block_sum(gauge, q, x, all, labels, *std::max_element(labels.begin(), labels.end()) + 1) / denom;
  });
  GeometryEstimate out{GeometryMode::kLowerQ, 0.0, 0, 0};
  for (double r : ratio) {
    if (std::isnan(r)) {
      ++out.skipped;
      continue;
    }
    ++out.used;
    out.value = std::max(out.value, r);
  }
  if (out.used == 0) throw InputError("every lower-q sample was degenerate");
  return out;
}

GeometryEstimate estimate_q_convex(const Gauge& gauge, double q, std::size_t samples, std::uint64_t seed) {
  if (!(q >= 2.0)) throw InputError("q-convexity estimate requires q >= 2");
  const int d = gauge.dim();
  std::vector<double> ratio(samples, std::numeric_limits<double>::quiet_NaN());
  for_each_index(samples, Execution::kParallel, [&](std::size_t i) {
    Rng rng = block_rng(seed, i);
    Eigen::VectorXd x = gaussian_vector(d, rng);
    Eigen::VectorXd y = gaussian_vector(d, rng);
    const double gx = gauge(x), gy = gauge(y);
    if (!(gx > 0.0) || !(gy > 0.0)) return;
    x /= gx;
    y /= gy;
    const double gap = gauge(x - y);
    if (!(gap > 0.0)) return;
    ratio[i] = (1.0 - gauge(0.5 * (x + y))) / std::pow(gap, q);
  });
  GeometryEstimate out{GeometryMode::kQConvex, std::numeric_limits<double>::infinity(), 0, 0};
  for (double r : ratio) {
    if (std::isnan(r)) {
      ++out.skipped;
      continue;
    }
    ++out.used;
    out.value = std::min(out.value, r);
  }
  if (out.used == 0) throw InputError("every q-convexity sample was degenerate");
  return out;
}

GeometryEstimate estimate_geom_condition(const InterpolationProblem& prob, const Gauge& gauge, double q,
                                         const std::vector<double>& ts) {
  const auto& space = *prob.ground;
  if (!space.has_coords()) throw InputError("geometric condition needs coordinates");
  const Eigen::MatrixXd& c = space.coords();
  GeometryEstimate out{GeometryMode::kGeomCondition, 0.0, 0, 0};
  for (double t : ts) {
    if (!(t > 0.0)) {
      ++out.skipped;
      continue;
    }
    const auto k_t = interpolation_set(prob, t);
    for (std::size_t i = 0; i < k_t.size(); ++i)
      for (std::size_t j = i + 1; j < k_t.size(); ++j) {
        const double d = space(k_t[i], k_t[j]);
        if (!(d > 0.0)) {
          ++out.skipped;
          continue;
        }
        const Eigen::VectorXd diff = (c.row(k_t[i]) - c.row(k_t[j])).transpose();
        out.value = std::max(out.value, std::pow(gauge(diff), q) / (t * d));
        ++out.used;
      }
  }
  return out;
}

const char* to_string(GeometryMode m) {
  switch (m) {
    case GeometryMode::kLowerQ: return "lower_q";
    case GeometryMode::kQConvex: return "q_convex";
    case GeometryMode::kGeomCondition: return "geom_condition";
  }
  return "?";
}

}  // namespace chainlab

#include "chainlab/interpolation.hpp"

#include <algorithm>
#include <cmath>

#include "chainlab/partitions.hpp"

namespace chainlab {

InterpolationProblem::InterpolationProblem(const FiniteMetricSpace& space, std::vector<double> f, double power,
                                           std::vector<PointIndex> t)
    : ground(&space), penalty(std::move(f)), q(power), target(std::move(t)) {
  if (penalty.size() != space.size()) throw InputError("penalty must have one entry per point");
  if (!(q >= 1.0) || !std::isfinite(q)) throw InputError("power q must be >= 1");
  bool any = false;
  for (double v : penalty) {
    if (std::isnan(v) || v < 0.0) throw InputError("penalty values must be nonnegative");
    any = any || std::isfinite(v);
  }
  if (!any) throw InputError("every penalty is excluded; no candidates");
  std::sort(target.begin(), target.end());
  target.erase(std::unique(target.begin(), target.end()), target.end());
  for (PointIndex x : target)
    if (x < 0 || static_cast<std::size_t>(x) >= space.size()) throw InputError("target index out of range");
}

namespace {

double move_cost(double t, double d, double q) { return q == 1.0 ? t * d : std::pow(t, q) * std::pow(d, q); }

}  // namespace

KValue k_functional(const InterpolationProblem& prob, double t, PointIndex x) {
  if (!(t >= 0.0)) throw InputError("t must be >= 0");
  const auto& space = *prob.ground;
  KValue best{kExcluded, -1};
  const auto n = static_cast<PointIndex>(space.size());
  for (PointIndex y = 0; y < n; ++y) {
    const double f = prob.penalty[static_cast<std::size_t>(y)];
    if (!std::isfinite(f)) continue;
    const double cost = f + move_cost(t, space(x, y), prob.q);
    if (cost < best.value) best = {cost, y};
  }
  if (best.minimizer < 0) throw InputError("no candidate with finite penalty");
  // prefer x itself whenever it attains the minimum
  const double fx = prob.penalty[static_cast<std::size_t>(x)];
  if (std::isfinite(fx) && fx == best.value) best.minimizer = x;
  return best;
}

std::vector<PointIndex> interpolation_set(const InterpolationProblem& prob, double t) {
  std::vector<PointIndex> out;
  for (PointIndex x : prob.target) out.push_back(k_functional(prob, t, x).minimizer);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

TelescopingReport telescoping_check(const InterpolationProblem& prob, double alpha, double a, int n_max) {
  if (!(a > 0.0)) throw InputError("a must be positive");
  if (!(alpha > 0.0)) throw InputError("alpha must be positive");
  if (n_max < 0) throw InputError("n_max must be >= 0");
  const auto& space = *prob.ground;
  TelescopingReport out;
  out.n_max = n_max;
  out.constant = prob.q == 1.0 ? a * (1.0 - std::exp2(-1.0 / alpha))
                               : std::pow(a, prob.q) * (1.0 - std::exp2(-prob.q / alpha));
  for (PointIndex x : prob.target) {
    double sum = 0.0;
    for (int n = 0; n <= n_max; ++n) {
      const double scale = level_scale(n, alpha);
      const PointIndex pi = k_functional(prob, a * scale, x).minimizer;
      sum += std::pow(scale * space(x, pi), prob.q);
    }
    const double f = prob.penalty[static_cast<std::size_t>(x)];
    const double lhs = sum * out.constant;
    const double ratio = lhs == 0.0 ? 0.0 : lhs / f;
    out.sums.push_back(sum);
    out.ratios.push_back(ratio);
    out.max_ratio = std::max(out.max_ratio, ratio);
  }
  return out;
}

ProjectionReport projection_check(const InterpolationProblem& prob, double t, double u) {
  if (prob.q != 1.0) throw InputError("projection_check applies to the linear variant (q = 1)");
  ProjectionReport out;
  const auto& space = *prob.ground;
  const auto n = static_cast<PointIndex>(space.size());
  for (PointIndex x = 0; x < n; ++x) {
    const bool in_t = std::binary_search(prob.target.begin(), prob.target.end(), x);
    if (in_t != (prob.penalty[static_cast<std::size_t>(x)] <= u)) {
      out.sublevel = false;
      out.problem = "target is not the sublevel set {f <= u}";
      return out;
    }
  }
  std::vector<PointIndex> fixed;
  for (PointIndex x : prob.target) {
    const KValue k = k_functional(prob, t, x);
    if (k_functional(prob, t, k.minimizer).minimizer != k.minimizer) out.idempotent = false;
    if (!std::binary_search(prob.target.begin(), prob.target.end(), k.minimizer)) out.inside_target = false;
    out.k_t.push_back(k.minimizer);
    if (k.value == prob.penalty[static_cast<std::size_t>(x)]) fixed.push_back(x);
  }
  std::sort(out.k_t.begin(), out.k_t.end());
  out.k_t.erase(std::unique(out.k_t.begin(), out.k_t.end()), out.k_t.end());
  out.fixed_points_match = fixed == out.k_t;
  if (!out.idempotent) out.problem = "pi_t is not idempotent";
  else if (!out.inside_target) out.problem = "K_t leaves the target";
  else if (!out.fixed_points_match) out.problem = "K_t differs from the fixed-point set";
  return out;
}

EllipsoidProjection ellipsoid_closed_form(double t, const Eigen::VectorXd& x) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("t must be finite and >= 0");
  const Eigen::Index d = x.size();
  EllipsoidProjection out;
  out.pi.resize(d);
  out.weights.resize(d);
  out.residual.resize(d);
  const double t2 = t * t;
  out.weights_infinite = t == 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double k = static_cast<double>(i + 1);
    out.pi(i) = t2 * x(i) / (t2 + k);
    out.weights(i) = t == 0.0 ? kExcluded : std::pow((t2 + k) / t2, 2) * k;
    out.residual(i) = 2.0 * k * out.pi(i) - 2.0 * t2 * (x(i) - out.pi(i));
  }
  return out;
}

}  // namespace chainlab

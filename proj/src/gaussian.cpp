#include "chainlab/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "chainlab/partitions.hpp"
#include "chainlab/rng.hpp"

namespace chainlab {

GaussianProcess::GaussianProcess(Eigen::MatrixXd cov) : cov_(std::move(cov)) {
  if (cov_.rows() == 0 || cov_.rows() != cov_.cols()) throw InputError("covariance must be a nonempty square matrix");
  if (!cov_.allFinite()) throw InputError("covariance entries must be finite");
  const double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < cov_.rows(); ++i)
    for (Eigen::Index j = i + 1; j < cov_.cols(); ++j)
      if (std::abs(cov_(i, j) - cov_(j, i)) > 1e-12 * scale) throw InputError("covariance must be symmetric");
  cov_ = 0.5 * (cov_ + cov_.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov_);
  Eigen::VectorXd lambda = eig.eigenvalues();
  const double floor = -1e-10 * std::max(1.0, lambda.maxCoeff());
  if (lambda.minCoeff() < floor) throw InputError("covariance is not positive semidefinite");
  lambda = lambda.cwiseMax(0.0);
  factor_ = eig.eigenvectors() * lambda.cwiseSqrt().asDiagonal();
}

GaussianProcess GaussianProcess::from_points(const Eigen::MatrixXd& points) {
  if (points.rows() == 0) throw InputError("process points are empty");
  return GaussianProcess(points * points.transpose());
}

FiniteMetricSpace GaussianProcess::natural_metric() const {
  const auto n = cov_.rows();
  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      dist(i, j) = dist(j, i) = std::sqrt(std::max(0.0, cov_(i, i) + cov_(j, j) - 2.0 * cov_(i, j)));
  return FiniteMetricSpace(std::move(dist));
}

ProcessSamples::ProcessSamples(const GaussianProcess& process, std::size_t samples, std::uint64_t seed,
                               Execution exec)
    : seed_(seed) {
  if (samples == 0) throw InputError("sample count must be positive");
  const Eigen::MatrixXd& f = process.factor();
  draws_.resize(static_cast<Eigen::Index>(samples), f.rows());
  const std::size_t blocks = (samples + kSamplesPerBlock - 1) / kSamplesPerBlock;
  for_each_index(blocks, exec, [&](std::size_t b) {
    Rng rng = block_rng(seed, b);
    std::normal_distribution<double> normal;
    Eigen::VectorXd g(f.cols());
    const std::size_t lo = b * kSamplesPerBlock;
    const std::size_t hi = std::min(samples, lo + kSamplesPerBlock);
    for (std::size_t s = lo; s < hi; ++s) {
      for (Eigen::Index k = 0; k < g.size(); ++k) g(k) = normal(rng);
      draws_.row(static_cast<Eigen::Index>(s)) = (f * g).transpose();
    }
  });
}

McEstimate summarize(const std::vector<double>& values) {
  McEstimate out;
  out.samples = values.size();
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.se = std::sqrt(ss / static_cast<double>(values.size() - 1) / static_cast<double>(values.size()));
  }
  return out;
}

McEstimate mc_sup(const ProcessSamples& draws, const std::vector<PointIndex>& a) {
  if (a.empty()) throw InputError("mc_sup needs a nonempty subset");
  const Eigen::MatrixXd& x = draws.draws();
  for (PointIndex i : a)
    if (i < 0 || i >= x.cols()) throw InputError("subset index out of range");
  std::vector<double> maxima(draws.samples());
  for (std::size_t s = 0; s < maxima.size(); ++s) {
    double m = x(static_cast<Eigen::Index>(s), a.front());
    for (PointIndex i : a) m = std::max(m, x(static_cast<Eigen::Index>(s), i));
    maxima[s] = m;
  }
  return summarize(maxima);
}

McEstimate mc_sup(const GaussianProcess& process, const std::vector<PointIndex>& a, std::size_t samples,
                  std::uint64_t seed) {
  if (samples < 1000) throw InputError("mc_sup needs at least 1000 samples");
  return mc_sup(ProcessSamples(process, samples, seed), a);
}

std::vector<BallWidths> ball_widths(const FiniteMetricSpace& metric, const ProcessSamples& draws, Execution exec) {
  const std::size_t n = metric.size();
  if (static_cast<std::size_t>(draws.draws().cols()) != n) throw InputError("samples do not match the process size");
  std::vector<BallWidths> out(n);
  const Eigen::MatrixXd& x = draws.draws();
  const std::size_t samples = draws.samples();
  for_each_index(n, exec, [&](std::size_t c) {
    const auto center = static_cast<PointIndex>(c);
    std::vector<PointIndex> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](PointIndex u, PointIndex v) { return metric(center, u) < metric(center, v); });
    // group boundaries: ends[j] = number of points within radii[j]
    BallWidths& w = out[c];
    w.center = center;
    std::vector<std::size_t> ends;
    if (metric(center, order.front()) != 0.0) throw InputError("distance to self must be 0");
    for (std::size_t k = 0; k < n; ++k) {
      const double r = metric(center, order[k]);
      if (k + 1 == n || metric(center, order[k + 1]) != r) {
        w.radii.push_back(r);
        ends.push_back(k + 1);
      }
    }
    std::vector<std::vector<double>> per_radius(ends.size(), std::vector<double>(samples));
    for (std::size_t s = 0; s < samples; ++s) {
      const auto row = static_cast<Eigen::Index>(s);
      double m = x(row, order.front());
      std::size_t k = 0;
      for (std::size_t j = 0; j < ends.size(); ++j) {
        for (; k < ends[j]; ++k) m = std::max(m, x(row, order[k]));
        per_radius[j][s] = m;
      }
    }
    for (const auto& v : per_radius) {
      const McEstimate e = summarize(v);
      w.width.push_back(e.mean);
      w.se.push_back(e.se);
    }
  });
  return out;
}

BallK ball_k_functional(double t, const BallWidths& table) {
  if (!(t >= 0.0)) throw InputError("t must be >= 0");
  if (table.radii.empty()) throw InputError("ball width table is empty");
  const double g_total = table.width.back();
  BallK best{t * table.radii[0] + g_total - table.width[0], table.radii[0]};
  for (std::size_t j = 1; j < table.radii.size(); ++j) {
    const double v = t * table.radii[j] + g_total - table.width[j];
    if (v < best.value) best = {v, table.radii[j]};
  }
  return best;
}

MmPipelineResult mm_pipeline(const GaussianProcess& process, double a, std::size_t samples, std::uint64_t seed,
                             double c) {
  if (!(a > 0.0)) throw InputError("a must be positive");
  if (!(c >= 0.0)) throw InputError("contraction constant must be >= 0");
  const FiniteMetricSpace metric = process.natural_metric();
  const ProcessSamples draws(process, samples, seed);
  const auto widths = ball_widths(metric, draws);
  const SubsetView t = SubsetView::all(metric);
  std::vector<PointIndex> all(t.indices().begin(), t.indices().end());

  MmPipelineResult out;
  out.g_total = mc_sup(draws, all);
  out.low_confidence = out.g_total.se > 0.1 * out.g_total.mean;

  const int n_max = default_n_max(t.size());
  ControlMatrix ctrl;
  ctrl.a = c * a;
  ctrl.s = Eigen::MatrixXd::Zero(n_max + 1, static_cast<Eigen::Index>(metric.size()));
  const double alpha = 2.0;
  const double telescope = a * (1.0 - std::exp2(-0.5));
  for (PointIndex x : all) {
    const BallWidths& w = widths[static_cast<std::size_t>(x)];
    double sum = 0.0;
    for (int n = 0; n <= n_max; ++n) {
      const double s = ball_k_functional(a * level_scale(n, alpha), w).radius;
      ctrl.s(n, x) = (a + 1.0) * s;
      sum += level_scale(n, alpha) * s;
    }
    const double room = w.width.back() - w.width.front();
    const double ratio = sum == 0.0 ? 0.0 : telescope * sum / room;
    out.telescoping_ratio = std::max(out.telescoping_ratio, ratio);
  }
  BuildResult build = contraction_build(metric, t, ctrl, alpha, n_max);
  BoundReport& r = out.report;
  r.name = "mm_pipeline";
  r.terms = {{"witness_value", value(metric, build.seq, alpha, 1.0)}};
  r.extras = {{"g_hat", out.g_total.mean},
              {"g_se", out.g_total.se},
              {"samples", static_cast<double>(out.g_total.samples)},
              {"telescoping_ratio", out.telescoping_ratio},
              {"diagnostic_segments", static_cast<double>(build.diagnostics.size())},
              {"recursion_violations", static_cast<double>(build.violations.size())},
              {"admissible", build.audit.ok ? 1.0 : 0.0}};
  r.params = {{"alpha", alpha}, {"p", 1.0}, {"a", a}, {"c", c}, {"seed", static_cast<double>(seed)}};
  for (const auto& d : build.diagnostics)
    r.diagnostics.push_back("level " + std::to_string(d.level) + " segment " + std::to_string(d.segment) +
                            " of cell " + std::to_string(d.cell) + " exceeds its piece budget");
  if (!build.violations.empty()) r.diagnostics.push_back("diameter recursion fails");
  if (out.low_confidence) r.diagnostics.push_back("low confidence: standard error above 10% of G(T)");
  r.witness = std::move(build.seq);
  r.value = evaluate(r);
  return out;
}

MinorationGap sudakov_minoration_gap(const FiniteMetricSpace& metric, const ProcessSamples& draws,
                                     const std::vector<PointIndex>& points, double sigma, double b, double c1,
                                     double c2) {
  if (points.empty()) throw InputError("minoration needs at least one point");
  if (!(sigma >= 0.0)) throw InputError("sigma must be >= 0");
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (metric(points[i], points[j]) < b) throw InputError("points are not b-separated");
  const auto n = static_cast<PointIndex>(metric.size());
  MinorationGap out;
  out.log_n = std::log(static_cast<double>(points.size()));
  std::vector<PointIndex> uni;
  out.min_ball = std::numeric_limits<double>::infinity();
  for (PointIndex x : points) {
    std::vector<PointIndex> ball;
    for (PointIndex y = 0; y < n; ++y)
      if (metric(x, y) <= sigma) ball.push_back(y);
    out.min_ball = std::min(out.min_ball, mc_sup(draws, ball).mean);
    uni.insert(uni.end(), ball.begin(), ball.end());
  }
  std::sort(uni.begin(), uni.end());
  uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
  out.union_width = mc_sup(draws, uni).mean;
  const double root = std::sqrt(out.log_n);
  out.gap = out.min_ball + c1 * b * root - out.union_width - c2 * sigma * root;
  return out;
}

}  // namespace chainlab

#include "chainlab/matrix_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "chainlab/rng.hpp"

namespace chainlab {

namespace {

constexpr double kPsdFloor = 1e-8;
constexpr double kRankOneTol = 1e-10;
constexpr double kAuditSlack = 1e-12;

void require_dim(const CoefficientEnsemble& ens, const Eigen::VectorXd& v, const char* what) {
  if (v.size() != ens.dim) throw InputError(std::string(what) + ": dimension mismatch");
}

Eigen::VectorXd gaussian(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd g(n);
  for (Eigen::Index k = 0; k < n; ++k) g(k) = normal(rng);
  return g;
}

Eigen::VectorXd ball_point(int dim, Rng& rng) {
  Eigen::VectorXd x = gaussian(dim, rng);
  const double r = std::pow(std::uniform_real_distribution<double>(0.0, 1.0)(rng), 1.0 / dim);
  const double nx = x.norm();
  return nx > 0.0 ? Eigen::VectorXd(x * (r / nx)) : Eigen::VectorXd::Zero(dim);
}

double lambda_max(const Eigen::MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

void finish(CoefficientEnsemble& ens) {
  ens.ordering = default_ordering(ens.matrices);
}

}  // namespace

double spectral_norm(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

std::vector<int> default_ordering(const std::vector<Eigen::MatrixXd>& matrices) {
  std::vector<double> norm(matrices.size());
  for (std::size_t k = 0; k < matrices.size(); ++k) norm[k] = spectral_norm(matrices[k]);
  std::vector<int> order(matrices.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return norm[static_cast<std::size_t>(a)] > norm[static_cast<std::size_t>(b)];
  });
  return order;
}

void set_ordering(CoefficientEnsemble& ens, std::vector<int> ordering) {
  if (ordering.size() != ens.size()) throw InputError("ordering must list every coefficient matrix once");
  std::vector<bool> seen(ens.size(), false);
  for (int k : ordering) {
    if (k < 0 || static_cast<std::size_t>(k) >= ens.size() || seen[static_cast<std::size_t>(k)])
      throw InputError("ordering is not a permutation");
    seen[static_cast<std::size_t>(k)] = true;
  }
  ens.ordering = std::move(ordering);
}

CoefficientEnsemble ensemble_from_matrices(std::vector<Eigen::MatrixXd> matrices) {
  if (matrices.empty()) throw InputError("matrices: ensemble is empty");
  CoefficientEnsemble ens;
  ens.dim = static_cast<int>(matrices.front().rows());
  if (ens.dim == 0) throw InputError("matrices: zero dimension");
  ens.psd = true;
  ens.rank_one = true;
  for (const auto& a : matrices) {
    if (a.rows() != ens.dim || a.cols() != ens.dim) throw InputError("matrices: every matrix must be d x d");
    if (!a.allFinite()) throw InputError("matrices: entries must be finite");
    if (a != a.transpose()) throw InputError("matrices: coefficient matrices must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
    const auto& lambda = eig.eigenvalues();
    const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
    const bool psd = lambda.minCoeff() >= -kPsdFloor * scale;
    ens.psd = ens.psd && psd;
    if (ens.rank_one) {
      const Eigen::Index top = ens.dim - 1;
      Eigen::VectorXd x = eig.eigenvectors().col(top) * std::sqrt(std::max(0.0, lambda(top)));
      if (psd && (a - x * x.transpose()).norm() <= kRankOneTol)
        ens.vectors.push_back(std::move(x));
      else
        ens.rank_one = false;
    }
  }
  if (!ens.rank_one) ens.vectors.clear();
  ens.matrices = std::move(matrices);
  finish(ens);
  return ens;
}

CoefficientEnsemble ensemble_from_rank_one(const std::vector<Eigen::VectorXd>& vectors) {
  if (vectors.empty()) throw InputError("rank_one: ensemble is empty");
  CoefficientEnsemble ens;
  ens.dim = static_cast<int>(vectors.front().size());
  if (ens.dim == 0) throw InputError("rank_one: zero dimension");
  for (const auto& x : vectors) {
    if (x.size() != ens.dim) throw InputError("rank_one: vectors must share one dimension");
    if (!x.allFinite()) throw InputError("rank_one: entries must be finite");
    ens.matrices.push_back(x * x.transpose());
  }
  ens.vectors = vectors;
  ens.psd = true;
  ens.rank_one = true;
  finish(ens);
  return ens;
}

CoefficientEnsemble ensemble_from_variances(const Eigen::MatrixXd& b) {
  const auto d = b.rows();
  if (d == 0 || b.cols() != d) throw InputError("independent_entry: b must be a nonempty square matrix");
  if (!b.allFinite()) throw InputError("independent_entry: entries must be finite");
  if (b != b.transpose()) throw InputError("independent_entry: b must be symmetric");
  if (b.minCoeff() < 0.0) throw InputError("independent_entry: b entries must be nonnegative");
  std::vector<Eigen::MatrixXd> mats;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i; j < d; ++j) {
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
      a(i, j) = b(i, j);
      a(j, i) = b(i, j);
      mats.push_back(std::move(a));
    }
  CoefficientEnsemble ens = ensemble_from_matrices(std::move(mats));
  ens.variances = b;
  return ens;
}

Eigen::MatrixXd sum_of_squares(const CoefficientEnsemble& ens) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(ens.dim, ens.dim);
  for (const auto& a : ens.matrices) s.noalias() += a * a;
  return s;
}

MatrixSamples sample_matrices(const CoefficientEnsemble& ens, std::size_t samples, std::uint64_t seed,
                              Execution exec) {
  if (samples == 0) throw InputError("sample count must be positive");
  MatrixSamples out;
  out.spectral.resize(samples);
  out.row_max.resize(samples);
  const std::size_t blocks = (samples + kSamplesPerBlock - 1) / kSamplesPerBlock;
  const auto m = static_cast<Eigen::Index>(ens.size());
  for_each_index(blocks, exec, [&](std::size_t blk) {
    Rng rng = block_rng(seed, blk);
    Eigen::MatrixXd x(ens.dim, ens.dim);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(ens.dim);
    const std::size_t lo = blk * kSamplesPerBlock;
    const std::size_t hi = std::min(samples, lo + kSamplesPerBlock);
    for (std::size_t s = lo; s < hi; ++s) {
      const Eigen::VectorXd g = gaussian(m, rng);
      x.setZero();
      for (Eigen::Index k = 0; k < m; ++k) x += g(k) * ens.matrices[static_cast<std::size_t>(k)];
      eig.compute(x, Eigen::EigenvaluesOnly);
      out.spectral[s] = eig.eigenvalues().cwiseAbs().maxCoeff();
      out.row_max[s] = x.rowwise().norm().maxCoeff();
    }
  });
  return out;
}

McEstimate mc_spectral_norm(const CoefficientEnsemble& ens, std::size_t samples, std::uint64_t seed,
                            Execution exec) {
  if (samples < 500) throw InputError("samples: spectral norm estimates need at least 500 samples");
  return summarize(sample_matrices(ens, samples, seed, exec).spectral);
}

McEstimate row_norm_lower(const Eigen::MatrixXd& b, std::size_t samples, std::uint64_t seed) {
  return summarize(sample_matrices(ensemble_from_variances(b), samples, seed).row_max);
}

double norm_at(const CoefficientEnsemble& ens, const Eigen::VectorXd& v, const Eigen::VectorXd& z) {
  require_dim(ens, v, "norm_at");
  require_dim(ens, z, "norm_at");
  double s = 0.0;
  for (const auto& a : ens.matrices) {
    const double c = z.dot(a * v);
    s += c * c;
  }
  return std::sqrt(s);
}

double quartic_norm(const CoefficientEnsemble& ens, const Eigen::VectorXd& v) {
  require_dim(ens, v, "quartic_norm");
  double s = 0.0;
  for (const auto& a : ens.matrices) {
    const double c = v.dot(a * v);
    s += c * c;
  }
  return std::pow(s, 0.25);
}

double natural_distance(const CoefficientEnsemble& ens, const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
  return norm_at(ens, v - w, v + w);
}

double regularized_distance(const CoefficientEnsemble& ens, const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
  const double q = quartic_norm(ens, v - w);
  return natural_distance(ens, v, w) + q * q;
}

MixedNorms mixed_norms(const CoefficientEnsemble& ens, const Eigen::VectorXd& v, const Eigen::VectorXd& z,
                       const Eigen::VectorXd& w) {
  require_dim(ens, w, "mixed_norms");
  MixedNorms out;
  out.norm_vz = norm_at(ens, v, z);
  out.quartic_v = quartic_norm(ens, v);
  out.natural = natural_distance(ens, v, w);
  out.regularized = regularized_distance(ens, v, w);
  return out;
}

QuasiMetricAudit audit_quasi_metric(const CoefficientEnsemble& ens, std::size_t triples, std::uint64_t seed) {
  if (!ens.psd) throw InputError("quasi-metric audit requires a psd ensemble");
  QuasiMetricAudit out;
  out.triples = triples;
  for (std::size_t i = 0; i < triples; ++i) {
    Rng rng = block_rng(seed, i);
    const Eigen::VectorXd v = ball_point(ens.dim, rng);
    const Eigen::VectorXd w = ball_point(ens.dim, rng);
    const Eigen::VectorXd z = ball_point(ens.dim, rng);
    const double vw = regularized_distance(ens, v, w);
    const double tri = 2.0 * (regularized_distance(ens, v, z) + regularized_distance(ens, z, w));
    const double mid = regularized_distance(ens, v, 0.5 * (v + w));
    if (vw > tri * (1.0 + kAuditSlack)) ++out.triangle_violations;
    if (mid > 0.5 * vw * (1.0 + kAuditSlack)) ++out.midpoint_violations;
    if (tri > 0.0) out.worst_triangle_ratio = std::max(out.worst_triangle_ratio, vw / tri);
    if (vw > 0.0) out.worst_midpoint_ratio = std::max(out.worst_midpoint_ratio, mid / (0.5 * vw));
  }
  return out;
}

const char* to_string(MatrixBound b) {
  switch (b) {
    case MatrixBound::kRudelson: return "rudelson";
    case MatrixBound::kDimensionFree: return "dimension_free";
    case MatrixBound::kSupernck: return "supernck";
  }
  return "?";
}

BoundReport matrix_closed_bound(const CoefficientEnsemble& ens, MatrixBound kind, std::size_t samples,
                                std::uint64_t seed) {
  BoundReport r;
  r.name = to_string(kind);
  const double m = static_cast<double>(ens.size());
  r.params = {{"m", m}, {"d", static_cast<double>(ens.dim)}};
  switch (kind) {
    case MatrixBound::kRudelson:
      r.terms = {{"variance_norm", std::sqrt(spectral_norm(sum_of_squares(ens)))}};
      r.scale = std::sqrt(std::log(m + 1.0));
      break;
    case MatrixBound::kDimensionFree: {
      if (!ens.rank_one) throw InputError("dimension_free bound requires a rank-one ensemble");
      Eigen::MatrixXd s = Eigen::MatrixXd::Zero(ens.dim, ens.dim);
      for (std::size_t k = 0; k < ens.size(); ++k) {
        const auto& a = ens.matrices[static_cast<std::size_t>(ens.ordering[k])];
        s.noalias() += std::log(static_cast<double>(k) + 2.0) * (a * a);
      }
      r.terms = {{"weighted_variance_norm", std::sqrt(spectral_norm(s))}};
      break;
    }
    case MatrixBound::kSupernck: {
      if (!ens.psd) throw InputError("supernck bound requires a psd ensemble");
      if (samples == 0) throw InputError("samples must be positive");
      std::vector<double> tilde(samples);
      const std::size_t blocks = (samples + kSamplesPerBlock - 1) / kSamplesPerBlock;
      for_each_index(blocks, Execution::kParallel, [&](std::size_t blk) {
        Rng rng = block_rng(seed, blk);
        Eigen::MatrixXd w(ens.dim, static_cast<Eigen::Index>(ens.size()));
        const std::size_t lo = blk * kSamplesPerBlock;
        const std::size_t hi = std::min(samples, lo + kSamplesPerBlock);
        for (std::size_t s = lo; s < hi; ++s) {
          const Eigen::VectorXd g = gaussian(ens.dim, rng);
          for (std::size_t k = 0; k < ens.size(); ++k) w.col(static_cast<Eigen::Index>(k)) = ens.matrices[k] * g;
          tilde[s] = std::sqrt(std::max(0.0, lambda_max(w * w.transpose())));
        }
      });
      const McEstimate e = summarize(tilde);
      r.terms = {{"variance_norm", std::sqrt(spectral_norm(sum_of_squares(ens)))}, {"mean_tilde_norm", e.mean}};
      r.extras = {{"se", e.se}, {"samples", static_cast<double>(e.samples)}};
      r.params.emplace_back("seed", static_cast<double>(seed));
      break;
    }
  }
  r.value = evaluate(r);
  return r;
}

Eigen::MatrixXd sphere_discretization(int dim, int count, std::uint64_t seed) {
  if (dim <= 0 || count < 0) throw InputError("sphere discretization needs dim > 0 and count >= 0");
  Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(count + 1, dim);
  Rng rng = block_rng(seed, 0);
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd x;
    do x = gaussian(dim, rng);
    while (!(x.norm() > 0.0));
    pts.row(i) = (x / x.norm()).transpose();
  }
  return pts;
}

BoundReport gordon_bound(const CoefficientEnsemble& ens, const Eigen::MatrixXd& t, double eta, int sphere_points,
                         std::uint64_t seed) {
  if (!ens.psd) throw InputError("gordon bound requires a psd ensemble");
  if (!(eta > 0.0)) throw InputError("eta must be positive");
  if (t.rows() == 0 || t.cols() != ens.dim) throw InputError("points: T must be a nonempty list of d-vectors");
  for (Eigen::Index i = 0; i < t.rows(); ++i)
    if (t.row(i).norm() > 1.0 + 1e-12) throw InputError("points: T must lie in the unit ball");
  const Eigen::MatrixXd s2 = sum_of_squares(ens);
  double sup_trace = 0.0;
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    const Eigen::VectorXd v = t.row(i).transpose();
    sup_trace = std::max(sup_trace, v.dot(s2 * v));
  }
  const Eigen::MatrixXd ball = sphere_discretization(ens.dim, sphere_points, seed);
  const auto n = ball.rows();
  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      dist(i, j) = dist(j, i) = quartic_norm(ens, (ball.row(i) - ball.row(j)).transpose());
  const FiniteMetricSpace space(std::move(dist), 1.0, ball);
  double sup_entropy = 0.0;
  for (const auto& e : entropy_profile(SubsetView::all(space), EntropyMethod::kGreedy))
    sup_entropy = std::max(sup_entropy, std::exp2(e.n / 4.0) * e.value);

  BoundReport r;
  r.name = "gordon";
  r.terms = {{"trace", std::sqrt(sup_trace / eta)}, {"covering", sup_entropy * sup_entropy}};
  // the covering term is always taken on the whole ball, an upper-bound proxy for smaller T
  r.extras = {{"sup_trace_sigma_v", sup_trace}, {"ball_points", static_cast<double>(n)},
              {"covering_ball_proxy", 1.0}};
  r.params = {{"eta", eta}, {"m", static_cast<double>(ens.size())}, {"d", static_cast<double>(ens.dim)},
              {"seed", static_cast<double>(seed)}};
  r.value = evaluate(r);
  return r;
}

TraceIdentity trace_identity(const CoefficientEnsemble& ens, const Eigen::VectorXd& v, int sphere_points,
                             std::uint64_t seed, int n_max, EntropyMethod method) {
  require_dim(ens, v, "trace_identity");
  if (n_max < 0 || n_max > kMaxEntropyLevel) throw InputError("n_max out of range");
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(ens.dim, ens.dim);
  for (const auto& a : ens.matrices) {
    const Eigen::VectorXd av = a * v;
    sigma.noalias() += av * av.transpose();
  }
  const Eigen::MatrixXd ball = sphere_discretization(ens.dim, sphere_points, seed);
  const auto n = ball.rows();
  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Eigen::VectorXd diff = (ball.row(i) - ball.row(j)).transpose();
      dist(i, j) = dist(j, i) = std::sqrt(std::max(0.0, diff.dot(sigma * diff)));
    }
  const FiniteMetricSpace space(std::move(dist), 1.0, ball);
  const SubsetView all = SubsetView::all(space);
  TraceIdentity out;
  out.trace = sigma.trace();
  for (int k = 0; k <= n_max; ++k) {
    const EntropyResult e = entropy_number(all, k, method);
    out.exact = out.exact && e.exact && method != EntropyMethod::kGreedy;
    out.entropy.push_back(e.value);
    const double term = std::exp2(k / 2.0) * e.value;
    out.entropy_sum += term * term;
  }
  out.ratio = out.trace > 0.0 ? out.entropy_sum / out.trace : 0.0;
  return out;
}

double abs_variant_norm(const CoefficientEnsemble& ens, const Eigen::VectorXd& v) {
  require_dim(ens, v, "abs_variant_norm");
  double s = 0.0;
  for (const auto& a : ens.matrices) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
    const Eigen::MatrixXd abs_a =
        eig.eigenvectors() * eig.eigenvalues().cwiseAbs().asDiagonal() * eig.eigenvectors().transpose();
    const double c = v.dot(abs_a * v);
    s += c * c;
  }
  return std::pow(s, 0.25);
}

double b_variant_norm(const Eigen::MatrixXd& b, const Eigen::VectorXd& v) {
  if (b.rows() != b.cols() || b.rows() != v.size()) throw InputError("b_variant_norm: dimension mismatch");
  const Eigen::MatrixXd b2 = b.cwiseProduct(b);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b2, Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  if (eig.eigenvalues().minCoeff() < -kPsdFloor * scale)
    throw InputError("b_variant_norm: the matrix of entry variances must be positive semidefinite");
  const Eigen::VectorXd v2 = v.cwiseProduct(v);
  return std::pow(std::max(0.0, v2.dot(b2 * v2)), 0.25);
}

}  // namespace chainlab

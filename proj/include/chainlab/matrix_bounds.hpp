#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "chainlab/bounds.hpp"
#include "chainlab/entropy.hpp"
#include "chainlab/gaussian.hpp"
#include "chainlab/parallel.hpp"

namespace chainlab {

/// Coefficients of the structured Gaussian matrix X = sum_k g_k A_k.
struct CoefficientEnsemble {
  int dim = 0;
  std::vector<Eigen::MatrixXd> matrices;
  bool psd = false;
  bool rank_one = false;
  std::vector<Eigen::VectorXd> vectors;      ///< A_k = x_k x_k^T, set when rank_one
  std::optional<Eigen::MatrixXd> variances;  ///< b, for independent-entry ensembles
  std::vector<int> ordering;                 ///< ordering[k] = matrix placed at position k+1

  std::size_t size() const { return matrices.size(); }
};

/// Validates symmetry and detects psd (eigenvalues >= -1e-8 max(1,|lambda|))
/// and rank one (||A - x x^T||_F <= 1e-10 for the top eigenpair).
CoefficientEnsemble ensemble_from_matrices(std::vector<Eigen::MatrixXd> matrices);
CoefficientEnsemble ensemble_from_rank_one(const std::vector<Eigen::VectorXd>& vectors);
/// A_ij = b_ij (e_i e_j^T + e_j e_i^T) for i < j and A_ii = b_ii e_i e_i^T,
/// so that X_ij ~ N(0, b_ij^2) for every entry.
CoefficientEnsemble ensemble_from_variances(const Eigen::MatrixXd& b);

/// Default ordering: stable sort by decreasing spectral norm.
std::vector<int> default_ordering(const std::vector<Eigen::MatrixXd>& matrices);
/// Replaces the ordering after checking it is a permutation.
void set_ordering(CoefficientEnsemble& ens, std::vector<int> ordering);

double spectral_norm(const Eigen::MatrixXd& a);
/// sum_k A_k^2
Eigen::MatrixXd sum_of_squares(const CoefficientEnsemble& ens);

/// Per-sample statistics of X, computed on the same draws.
struct MatrixSamples {
  std::vector<double> spectral;  ///< ||X||
  std::vector<double> row_max;   ///< max_i ||X_i.||_2
};

/// Block b of 256 draws comes from block_rng(seed, b).
MatrixSamples sample_matrices(const CoefficientEnsemble& ens, std::size_t samples, std::uint64_t seed,
                              Execution exec = Execution::kParallel);

/// E||X|| by Monte Carlo (samples >= 500).
McEstimate mc_spectral_norm(const CoefficientEnsemble& ens, std::size_t samples, std::uint64_t seed,
                            Execution exec = Execution::kParallel);

/// E max_i ||X_i.||_2 for the independent-entry ensemble of b; uses the same
/// random numbers as mc_spectral_norm with the same seed.
McEstimate row_norm_lower(const Eigen::MatrixXd& b, std::size_t samples, std::uint64_t seed);

struct MixedNorms {
  double norm_vz = 0.0;     ///< (sum <z, A_k v>^2)^{1/2}
  double quartic_v = 0.0;   ///< (sum <v, A_k v>^2)^{1/4}
  double natural = 0.0;     ///< (sum <v+w, A_k(v-w)>^2)^{1/2}
  double regularized = 0.0; ///< natural + quartic(v-w)^2
};

MixedNorms mixed_norms(const CoefficientEnsemble& ens, const Eigen::VectorXd& v, const Eigen::VectorXd& z,
                       const Eigen::VectorXd& w);
double norm_at(const CoefficientEnsemble& ens, const Eigen::VectorXd& v, const Eigen::VectorXd& z);
double quartic_norm(const CoefficientEnsemble& ens, const Eigen::VectorXd& v);
double natural_distance(const CoefficientEnsemble& ens, const Eigen::VectorXd& v, const Eigen::VectorXd& w);
double regularized_distance(const CoefficientEnsemble& ens, const Eigen::VectorXd& v, const Eigen::VectorXd& w);

struct QuasiMetricAudit {
  std::size_t triples = 0;
  std::size_t triangle_violations = 0;  ///< d~(v,w) > 2 (d~(v,z) + d~(z,w))
  std::size_t midpoint_violations = 0;  ///< d~(v,(v+w)/2) > d~(v,w)/2
  double worst_triangle_ratio = 0.0;
  double worst_midpoint_ratio = 0.0;
};

/// Random triples from the unit ball; comparisons allow 1e-12 relative slack
/// for rounding. Requires a psd ensemble.
QuasiMetricAudit audit_quasi_metric(const CoefficientEnsemble& ens, std::size_t triples, std::uint64_t seed);

enum class MatrixBound { kRudelson, kDimensionFree, kSupernck };
const char* to_string(MatrixBound b);

/// rudelson: ||sum A_k^2||^{1/2} sqrt(log(m+1)).
/// dimension_free: ||sum_k A_{ord(k)}^2 log(k+1)||^{1/2} (rank-one ensembles).
/// supernck: ||sum A_k^2||^{1/2} + E sqrt(lambda_max(sum (A_k g)(A_k g)^T)) (psd ensembles).
BoundReport matrix_closed_bound(const CoefficientEnsemble& ens, MatrixBound kind, std::size_t samples = 2000,
                                std::uint64_t seed = 0);

/// `count` uniform points on the unit sphere followed by the origin.
Eigen::MatrixXd sphere_discretization(int dim, int count, std::uint64_t seed);

/// eta^{-1/2} (sup_{v in T} <v, sum A_k^2 v>)^{1/2} + (sup_n 2^{n/4} e_n(ball, |||.|||))^2,
/// the second term by greedy covering on a discretized ball. T holds one point per row.
BoundReport gordon_bound(const CoefficientEnsemble& ens, const Eigen::MatrixXd& t, double eta = 0.25,
                         int sphere_points = 200, std::uint64_t seed = 0);

struct TraceIdentity {
  double entropy_sum = 0.0;  ///< sum_{n <= n_max} (2^{n/2} e_n(ball, ||.||_v))^2
  double trace = 0.0;        ///< Tr Sigma_v = <v, sum A_k^2 v>
  double ratio = 0.0;
  bool exact = true;
  std::vector<double> entropy;
};

/// ||w||_v = (w^T Sigma_v w)^{1/2} with Sigma_v = sum A_k v v^T A_k, on a
/// discretized ball.
TraceIdentity trace_identity(const CoefficientEnsemble& ens, const Eigen::VectorXd& v, int sphere_points,
                             std::uint64_t seed, int n_max = 2, EntropyMethod method = EntropyMethod::kExactSearch);

/// (sum <v, |A_k| v>^2)^{1/4}, |A| from the eigendecomposition.
double abs_variant_norm(const CoefficientEnsemble& ens, const Eigen::VectorXd& v);
/// (sum_ij v_i^2 b_ij^2 v_j^2)^{1/4}; requires (b_ij^2) positive semidefinite.
double b_variant_norm(const Eigen::MatrixXd& b, const Eigen::VectorXd& v);

}  // namespace chainlab

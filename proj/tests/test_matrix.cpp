#include <doctest.h>

#include <cmath>
#include <numbers>

#include "chainlab/matrix_bounds.hpp"
#include "support.hpp"

using namespace chainlab;

namespace {

CoefficientEnsemble identity_ensemble(int d) { return ensemble_from_matrices({Eigen::MatrixXd::Identity(d, d)}); }

}  // namespace

TEST_CASE("building ensembles") {
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(2);
  e1(0) = 1.0;
  const auto r = ensemble_from_rank_one({e1});
  REQUIRE(r.size() == 1);
  Eigen::MatrixXd want(2, 2);
  want << 1, 0, 0, 0;
  CHECK(r.matrices[0] == want);
  CHECK(r.psd);
  CHECK(r.rank_one);

  const auto from_mats = ensemble_from_matrices({want});
  CHECK(from_mats.rank_one);
  CHECK(from_mats.psd);
  Eigen::MatrixXd sym(2, 2);
  sym << 0, 1, 1, 0;
  const auto indefinite = ensemble_from_matrices({sym});
  CHECK_FALSE(indefinite.psd);
  CHECK_FALSE(indefinite.rank_one);
  Eigen::MatrixXd asym(2, 2);
  asym << 0, 1, 0, 0;
  CHECK_THROWS_AS(ensemble_from_matrices({asym}), InputError);

  const auto b = ensemble_from_variances(Eigen::MatrixXd::Identity(2, 2));
  // one coefficient per entry pair i <= j, zero entries included
  REQUIRE(b.size() == 3);
  CHECK(b.matrices[0](0, 0) == 1.0);
  CHECK(b.matrices[1].norm() == 0.0);
  CHECK(b.matrices[2](1, 1) == 1.0);
  CHECK(b.variances.has_value());
}

TEST_CASE("independent-entry ensembles have the requested entry variances") {
  Eigen::MatrixXd b(3, 3);
  b << 1.0, 0.5, 2.0, 0.5, 0.3, 1.5, 2.0, 1.5, 0.7;
  const auto ens = ensemble_from_variances(b);
  // Var(X_ij) = sum_k A_k(i,j)^2 exactly
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double v = 0.0;
      for (const auto& a : ens.matrices) v += a(i, j) * a(i, j);
      CHECK(v == doctest::Approx(b(i, j) * b(i, j)));
    }
  // and by sampling
  Rng rng = block_rng(4, 0);
  std::normal_distribution<double> g;
  const int samples = 40000;
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(3, 3);
  for (int s = 0; s < samples; ++s) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(3, 3);
    for (const auto& a : ens.matrices) x += g(rng) * a;
    second += x.cwiseProduct(x);
  }
  second /= samples;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(std::abs(second(i, j) - b(i, j) * b(i, j)) <= 0.05 * b(i, j) * b(i, j));
}

TEST_CASE("ordering") {
  std::vector<Eigen::MatrixXd> mats{Eigen::MatrixXd::Identity(2, 2), 3.0 * Eigen::MatrixXd::Identity(2, 2),
                                    Eigen::MatrixXd::Identity(2, 2)};
  CHECK(default_ordering(mats) == std::vector<int>{1, 0, 2});
  auto ens = ensemble_from_matrices(mats);
  set_ordering(ens, {2, 1, 0});
  CHECK(ens.ordering == std::vector<int>{2, 1, 0});
  CHECK_THROWS_AS(set_ordering(ens, {0, 0, 1}), InputError);
  CHECK_THROWS_AS(set_ordering(ens, {0, 1}), InputError);
}

TEST_CASE("Monte Carlo spectral norm") {
  const double want = std::sqrt(2.0 / std::numbers::pi);
  const auto id = mc_spectral_norm(identity_ensemble(4), 20000, 3);
  CHECK(std::abs(id.mean - want) <= 3.0 * id.se);
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(3);
  e1(0) = 1.0;
  const auto r1 = mc_spectral_norm(ensemble_from_rank_one({e1}), 20000, 3);
  CHECK(std::abs(r1.mean - want) <= 3.0 * r1.se);
  CHECK_THROWS_AS(mc_spectral_norm(identity_ensemble(2), 499, 1), InputError);

  // semicircle trend: E||X|| / (2 sqrt d) approaches 1 from below
  double last = 0.0;
  for (int d : {8, 16, 32}) {
    const auto est = mc_spectral_norm(ensemble_from_variances(Eigen::MatrixXd::Ones(d, d)), 600, 5);
    const double ratio = est.mean / (2.0 * std::sqrt(d));
    CHECK(ratio > last);
    CHECK(ratio < 1.2);
    last = ratio;
  }
}

TEST_CASE("matrix sampling is worker independent") {
  Rng rng = block_rng(8, 0);
  std::vector<Eigen::MatrixXd> mats;
  for (int k = 0; k < 5; ++k) mats.push_back(testsupport::random_symmetric(6, rng));
  const auto ens = ensemble_from_matrices(mats);
  const auto ref = sample_matrices(ens, 1000, 2, Execution::kSerial);
  for (int w : {1, 3}) {
    set_worker_cap(w);
    const auto par = sample_matrices(ens, 1000, 2, Execution::kParallel);
    CHECK(par.spectral == ref.spectral);
    CHECK(par.row_max == ref.row_max);
  }
  set_worker_cap(0);
  // row norms never exceed the spectral norm on the same draw
  for (std::size_t s = 0; s < ref.spectral.size(); ++s) CHECK(ref.row_max[s] <= ref.spectral[s] * (1 + 1e-12));
}

TEST_CASE("mixed norms") {
  const auto id = identity_ensemble(3);
  Rng rng = block_rng(9, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd v = testsupport::gaussian_matrix(3, 1, rng).col(0);
    const Eigen::VectorXd w = testsupport::gaussian_matrix(3, 1, rng).col(0);
    CHECK(quartic_norm(id, v) == doctest::Approx(v.norm()));
    CHECK(natural_distance(id, v, w) == doctest::Approx(std::abs(v.squaredNorm() - w.squaredNorm())));
    CHECK(natural_distance(id, v, v) == 0.0);
    CHECK(regularized_distance(id, v, v) == 0.0);
    const auto m = mixed_norms(id, v, w, v);
    CHECK(m.natural == 0.0);
    CHECK(m.regularized == 0.0);
  }
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Eigen::MatrixXd> mats;
    for (int k = 0; k < 4; ++k) mats.push_back(testsupport::random_psd(4, 2, rng));
    const auto ens = ensemble_from_matrices(mats);
    REQUIRE(ens.psd);
    const Eigen::VectorXd v = testsupport::unit_vector(4, rng), z = testsupport::unit_vector(4, rng);
    CHECK(norm_at(ens, v, z) <= quartic_norm(ens, v) * quartic_norm(ens, z) * (1 + 1e-12));
    CHECK(abs_variant_norm(ens, v) == doctest::Approx(quartic_norm(ens, v)).epsilon(1e-12));
  }
}

TEST_CASE("quasi-metric audit") {
  Rng rng = block_rng(10, 0);
  std::vector<Eigen::MatrixXd> mats;
  for (int k = 0; k < 3; ++k) mats.push_back(testsupport::random_psd(3, 3, rng));
  const auto ens = ensemble_from_matrices(mats);
  const auto audit = audit_quasi_metric(ens, 2000, 1);
  CHECK(audit.triples == 2000);
  CHECK(audit.triangle_violations == 0);
  CHECK(audit.midpoint_violations == 0);

  // regularized distances on a sampled family satisfy the 2-relaxed triangle inequality
  const int n = 12;
  Eigen::MatrixXd d(n, n);
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < n; ++i) pts.push_back(testsupport::unit_vector(3, rng) * 0.9);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d(i, j) = i == j ? 0.0 : regularized_distance(ens, pts[i], pts[j]);
  d = 0.5 * (d + d.transpose()).eval();
  CHECK(check_metric(FiniteMetricSpace(d, 2.0), 2.0).empty());
  Eigen::MatrixXd sym(2, 2);
  sym << 0, 1, 1, 0;
  CHECK_THROWS_AS(audit_quasi_metric(ensemble_from_matrices({sym}), 10, 1), InputError);
}

TEST_CASE("closed-form matrix bounds") {
  const auto id4 = identity_ensemble(4);
  const auto rud = matrix_closed_bound(id4, MatrixBound::kRudelson);
  CHECK(rud.value == doctest::Approx(std::sqrt(std::log(2.0))));
  CHECK(evaluate(rud) == rud.value);
  const auto sup = matrix_closed_bound(id4, MatrixBound::kSupernck, 4000, 1);
  // the second term is E sqrt(lambda_max(g g^T)) = E||g|| ~ sqrt(d)
  CHECK(sup.value >= std::sqrt(4.0));

  // orthonormal rank-one family: sum A_k^2 = I
  const int d = 5;
  std::vector<Eigen::VectorXd> basis;
  for (int k = 0; k < d; ++k) basis.push_back(Eigen::VectorXd::Unit(d, k));
  const auto ortho = ensemble_from_rank_one(basis);
  CHECK(matrix_closed_bound(ortho, MatrixBound::kRudelson).value == doctest::Approx(std::sqrt(std::log(d + 1.0))));
  CHECK(matrix_closed_bound(ortho, MatrixBound::kDimensionFree).value ==
        doctest::Approx(std::sqrt(std::log(d + 1.0))));

  // equal norms: log(k+1) <= log(m+1) termwise
  Rng eq = block_rng(21, 0);
  std::vector<Eigen::VectorXd> unit;
  for (int k = 0; k < 12; ++k) unit.push_back(testsupport::unit_vector(4, eq));
  const auto same = ensemble_from_rank_one(unit);
  CHECK(matrix_closed_bound(same, MatrixBound::kDimensionFree).value <=
        matrix_closed_bound(same, MatrixBound::kRudelson).value * (1 + 1e-12));

  // geometric decay: the dimension-free bound falls away from Rudelson's
  double last = INFINITY;
  for (int m : {16, 32, 64}) {
    std::vector<Eigen::VectorXd> vecs;
    Rng rng = block_rng(static_cast<std::uint64_t>(m), 0);
    for (int k = 0; k < m; ++k) vecs.push_back(testsupport::unit_vector(8, rng) * std::exp2(-k));
    const auto ens = ensemble_from_rank_one(vecs);
    const double ratio = matrix_closed_bound(ens, MatrixBound::kDimensionFree).value /
                         matrix_closed_bound(ens, MatrixBound::kRudelson).value;
    CHECK(ratio < 1.0);
    CHECK(ratio <= last);
    last = ratio;
  }
}

TEST_CASE("Gordon bound and the trace identity") {
  const auto id = identity_ensemble(3);
  Eigen::MatrixXd e1 = Eigen::MatrixXd::Zero(1, 3);
  e1(0, 0) = 1.0;
  const auto g = gordon_bound(id, e1, 0.25, 100, 1);
  CHECK(*find_value(g.terms, "trace") == doctest::Approx(2.0));
  CHECK(evaluate(g) == g.value);

  const auto sphere = sphere_discretization(3, 50, 2);
  REQUIRE(sphere.rows() == 51);
  CHECK(sphere.row(50).norm() == 0.0);
  for (int i = 0; i < 50; ++i) CHECK(sphere.row(i).norm() == doctest::Approx(1.0));

  Eigen::VectorXd v = Eigen::VectorXd::Unit(3, 0);
  const auto tr = trace_identity(id, v, 60, 3);
  CHECK(tr.trace == doctest::Approx(1.0));
  CHECK(tr.exact);
  CHECK(tr.ratio >= 0.125);
  CHECK(tr.ratio <= 8.0);
}

TEST_CASE("norm variants") {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(3, 3);
  b.diagonal() << 1.0, 2.0, 0.5;
  Eigen::VectorXd v(3);
  v << 0.3, -0.7, 0.2;
  double want = 0.0;
  for (int i = 0; i < 3; ++i) want += std::pow(v(i), 4) * b(i, i) * b(i, i);
  CHECK(b_variant_norm(b, v) == doctest::Approx(std::pow(want, 0.25)));
  Eigen::MatrixXd not_psd(2, 2);
  not_psd << 0, 1, 1, 0;
  CHECK_THROWS_AS(b_variant_norm(not_psd, Eigen::VectorXd::Ones(2)), InputError);
}

TEST_CASE("row-norm lower bound shares draws with the spectral estimate") {
  const Eigen::MatrixXd b = Eigen::MatrixXd::Ones(6, 6);
  const auto ens = ensemble_from_variances(b);
  const auto spec = mc_spectral_norm(ens, 2000, 4);
  const auto rows = row_norm_lower(b, 2000, 4);
  CHECK(rows.mean <= spec.mean);
  const auto s = sample_matrices(ens, 2000, 4);
  double mean = 0.0;
  for (double x : s.row_max) mean += x;
  CHECK(rows.mean == doctest::Approx(mean / 2000).epsilon(1e-12));
}

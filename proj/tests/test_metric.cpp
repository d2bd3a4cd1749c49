#include <doctest.h>

#include <cmath>

#include "chainlab/metric.hpp"
#include "support.hpp"

using namespace chainlab;

TEST_CASE("distances from coordinates") {
  Eigen::MatrixXd two(2, 1);
  two << 0, 1;
  const auto s = build_space(two, norms::Euclidean{});
  CHECK(s(0, 1) == 1.0);
  CHECK(s(1, 0) == 1.0);
  CHECK(s(0, 0) == 0.0);

  Eigen::MatrixXd tri(2, 2);
  tri << 0, 0, 3, 4;
  CHECK(build_space(tri, norms::Euclidean{})(0, 1) == doctest::Approx(5.0));

  Eigen::MatrixXd diag(2, 2);
  diag << 0, 0, 1, 1;
  CHECK(build_space(diag, norms::L1{})(0, 1) == 2.0);
  CHECK(build_space(diag, norms::LInf{})(0, 1) == 1.0);
  CHECK(build_space(diag, norms::WeightedL2{{4.0, 0.0}})(0, 1) == doctest::Approx(2.0));
}

TEST_CASE("invalid inputs are rejected") {
  Eigen::MatrixXd x(2, 2);
  x << 0, 0, 1, 1;
  CHECK_THROWS_AS(build_space(x, norms::WeightedL2{{1.0}}), InputError);
  CHECK_THROWS_AS(build_space(x, norms::WeightedL2{{1.0, -1.0}}), InputError);
  Eigen::MatrixXd asym(2, 2);
  asym << 0, 1, 2, 0;
  CHECK_THROWS_AS(FiniteMetricSpace{asym}, InputError);
  const auto s = build_space(x, norms::Euclidean{});
  CHECK_THROWS_AS(SubsetView(s, {0, 0}), InputError);
  CHECK_THROWS_AS(SubsetView(s, {2}), InputError);
}

TEST_CASE("triangle inequality audit") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) CHECK(check_metric(testsupport::random_space(seed, 9), 1.0).empty());

  // points 0 and 1 at distance 3, point 2 at distance 1 from both
  Eigen::MatrixXd d(3, 3);
  d << 0, 3, 1, 3, 0, 1, 1, 1, 0;
  const FiniteMetricSpace s(d);
  const auto bad = check_metric(s, 1.0);
  REQUIRE(bad.size() == 2);
  CHECK(bad[0] == Triple{0, 1, 2});
  CHECK(bad[1] == Triple{1, 0, 2});
  CHECK(check_metric(s, 1.5).empty());
}

TEST_CASE("diameter and helpers") {
  Eigen::MatrixXd sq(4, 2);
  sq << 0, 0, 1, 0, 0, 1, 1, 1;
  const auto s = build_space(sq, norms::Euclidean{});
  CHECK(diam(SubsetView::all(s)) == doctest::Approx(std::sqrt(2.0)));
  CHECK(diam(SubsetView(s, {2})) == 0.0);
  CHECK(diam(SubsetView(s, {0, 1})) == 1.0);
  CHECK(diam(SubsetView::empty(s)) == 0.0);
  const std::vector<PointIndex> net{0};
  CHECK(dist_to_set(s, 3, net) == doctest::Approx(std::sqrt(2.0)));
  CHECK(std::isinf(dist_to_set(s, 3, std::vector<PointIndex>{})));
  const std::vector<PointIndex> all{0, 1, 2, 3};
  CHECK(center_radius(s, all) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("diameter is monotone under inclusion") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = testsupport::random_space(seed, 10);
    std::vector<PointIndex> grow;
    double last = 0.0;
    for (PointIndex i = 0; i < 10; ++i) {
      grow.push_back(i);
      const double d = diam(SubsetView(s, grow));
      CHECK(d >= last);
      last = d;
    }
  }
}

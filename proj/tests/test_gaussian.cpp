#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "chainlab/gaussian.hpp"
#include "support.hpp"

using namespace chainlab;

TEST_CASE("natural metric") {
  const GaussianProcess id(Eigen::MatrixXd::Identity(2, 2));
  CHECK(id.natural_metric()(0, 1) == doctest::Approx(std::sqrt(2.0)));
  const GaussianProcess ones(Eigen::MatrixXd::Ones(3, 3));
  CHECK(diam(SubsetView::all(ones.natural_metric())) == 0.0);
  for (int i = 0; i < 8; ++i) {
    const auto m = testsupport::corpus_process(i).natural_metric();
    CHECK(check_metric(m, 1.0).empty());
  }
  // factor reproduces the covariance
  const auto p = testsupport::corpus_process(5);
  CHECK((p.factor() * p.factor().transpose() - p.cov()).norm() <= 1e-10 * (1.0 + p.cov().norm()));
}

TEST_CASE("covariance validation") {
  Eigen::MatrixXd asym(2, 2);
  asym << 1, 0.5, 0.4, 1;
  CHECK_THROWS_AS(GaussianProcess{asym}, InputError);
  Eigen::MatrixXd neg(2, 2);
  neg << 1, 2, 2, 1;
  CHECK_THROWS_AS(GaussianProcess{neg}, InputError);
}

TEST_CASE("Monte Carlo suprema") {
  const GaussianProcess two(Eigen::MatrixXd::Identity(2, 2));
  const auto single = mc_sup(two, {0}, 20000, 1);
  CHECK(std::abs(single.mean) <= 3.0 * single.se);
  CHECK(single.samples == 20000);
  const auto pair = mc_sup(two, {0, 1}, 20000, 1);
  CHECK(std::abs(pair.mean - 1.0 / std::sqrt(std::numbers::pi)) <= 3.0 * pair.se);

  const auto p = testsupport::corpus_process(6);
  const ProcessSamples draws(p, 5000, 4);
  std::vector<PointIndex> small{0, 3, 5}, big{0, 1, 2, 3, 4, 5, 6};
  const auto a = mc_sup(draws, small), b = mc_sup(draws, big);
  CHECK(a.mean <= b.mean + 3.0 * (a.se + b.se));
  // common random numbers: the inclusion holds sample by sample
  CHECK(a.mean <= b.mean);
  CHECK_THROWS_AS(mc_sup(two, {0}, 999, 1), InputError);
}

TEST_CASE("sampling is reproducible and worker independent") {
  const auto p = testsupport::corpus_process(7);
  const ProcessSamples serial(p, 3000, 11, Execution::kSerial);
  for (int w : {1, 2, 4}) {
    set_worker_cap(w);
    const ProcessSamples par(p, 3000, 11, Execution::kParallel);
    CHECK(par.draws() == serial.draws());
  }
  set_worker_cap(0);
  const ProcessSamples other(p, 3000, 12);
  CHECK(other.draws() != serial.draws());
  // a longer run extends the shorter one
  const ProcessSamples longer(p, 3300, 11);
  CHECK(longer.draws().topRows(3000) == serial.draws());

  const auto metric = p.natural_metric();
  const auto ws = ball_widths(metric, serial, Execution::kSerial);
  const auto wp = ball_widths(metric, serial, Execution::kParallel);
  REQUIRE(ws.size() == wp.size());
  for (std::size_t i = 0; i < ws.size(); ++i) {
    CHECK(ws[i].width == wp[i].width);
    CHECK(ws[i].radii == wp[i].radii);
  }
}

TEST_CASE("ball widths match direct estimates") {
  const auto p = testsupport::corpus_process(9);
  const auto metric = p.natural_metric();
  const ProcessSamples draws(p, 2000, 3);
  const auto tables = ball_widths(metric, draws);
  for (std::size_t x = 0; x < tables.size(); x += 3) {
    const auto& tab = tables[x];
    CHECK(tab.radii.front() == 0.0);
    CHECK(std::is_sorted(tab.radii.begin(), tab.radii.end()));
    for (std::size_t j = 0; j < tab.radii.size(); ++j) {
      std::vector<PointIndex> ball;
      for (PointIndex y = 0; y < static_cast<PointIndex>(metric.size()); ++y)
        if (metric(static_cast<PointIndex>(x), y) <= tab.radii[j]) ball.push_back(y);
      CHECK(tab.width[j] == doctest::Approx(mc_sup(draws, ball).mean).epsilon(1e-12));
    }
  }
}

TEST_CASE("ball K-functional") {
  const auto p = testsupport::corpus_process(5);
  const ProcessSamples draws(p, 4000, 8);
  const auto tables = ball_widths(p.natural_metric(), draws);
  for (const auto& tab : tables) {
    const double g = tab.width.back();
    const auto k0 = ball_k_functional(0.0, tab);
    CHECK(k0.value == doctest::Approx(0.0).epsilon(1e-12));
    const auto big = ball_k_functional(1e12, tab);
    CHECK(big.radius == 0.0);
    CHECK(big.value == doctest::Approx(g - tab.width.front()));
    double last = -INFINITY;
    for (double t : {0.0, 0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0}) {
      const auto k = ball_k_functional(t, tab);
      CHECK(k.value <= g - tab.width.front() + 1e-12);
      CHECK(k.value >= last - 1e-12);
      last = k.value;
      // exact minimum over the cached radii
      for (std::size_t j = 0; j < tab.radii.size(); ++j) CHECK(k.value <= t * tab.radii[j] + g - tab.width[j] + 1e-12);
    }
  }
}

TEST_CASE("majorizing-measure pipeline") {
  const GaussianProcess one(Eigen::MatrixXd::Identity(1, 1));
  CHECK(mm_pipeline(one, 1.0, 2000, 1).report.value == 0.0);

  const GaussianProcess iid(Eigen::MatrixXd::Identity(16, 16));
  const auto r = mm_pipeline(iid, 1.0, 20000, 5);
  CHECK(std::abs(r.g_total.mean - 1.766) <= 3.0 * r.g_total.se);
  REQUIRE(r.report.witness);
  CHECK(audit_admissible(*r.report.witness).ok);
  CHECK(r.report.value <= 64.0 * r.g_total.mean);
  CHECK(evaluate(r.report) == r.report.value);
  CHECK(r.telescoping_ratio <= 1.0);
  // same seed, same report
  CHECK(mm_pipeline(iid, 1.0, 20000, 5).report.value == r.report.value);
}

TEST_CASE("Sudakov minoration gap") {
  const auto p = testsupport::corpus_process(4);
  const auto metric = p.natural_metric();
  const ProcessSamples draws(p, 5000, 2);
  const auto g1 = sudakov_minoration_gap(metric, draws, {3}, 0.2, 1.0, 0.1, 10.0);
  CHECK(g1.gap == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(g1.log_n == 0.0);

  // i.i.d. coordinates, sigma = 0: plain Sudakov minoration
  const GaussianProcess iid(Eigen::MatrixXd::Identity(16, 16));
  const ProcessSamples d16(iid, 5000, 2);
  std::vector<PointIndex> all(16);
  for (int i = 0; i < 16; ++i) all[static_cast<std::size_t>(i)] = i;
  const auto g = sudakov_minoration_gap(iid.natural_metric(), d16, all, 0.0, std::sqrt(2.0), 0.1, 10.0);
  CHECK(g.gap <= 0.0);
  CHECK_THROWS_AS(sudakov_minoration_gap(iid.natural_metric(), d16, all, 0.0, 2.0, 0.1, 10.0), InputError);
}

#include <doctest.h>

#include <string>

#include "chainlab/io.hpp"

using namespace chainlab;
using io::json;

namespace {

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("point sets") {
  const auto s = io::read_point_set(json::parse(R"({"points": [[0, 0], [3, 4]]})"));
  CHECK(s(0, 1) == doctest::Approx(5.0));
  const auto l1 = io::read_point_set(json::parse(R"({"points": [[0, 0], [1, 1]], "norm": "l1"})"));
  CHECK(l1(0, 1) == 2.0);
  const auto li = io::read_point_set(json::parse(R"({"points": [[0, 0], [1, 2]], "norm": "linf"})"));
  CHECK(li(0, 1) == 2.0);
  const auto w = io::read_point_set(json::parse(R"({"points": [[0, 0], [1, 1]], "norm": {"weighted_l2": [3, 1]}})"));
  CHECK(w(0, 1) == doctest::Approx(2.0));
  const auto m =
      io::read_point_set(json::parse(R"({"norm": {"matrix": [[0, 2], [2, 0]]}, "kappa": 1.5, "ids": ["a", "b"]})"));
  CHECK(m(0, 1) == 2.0);
  CHECK(m.quasi_constant() == 1.5);
  CHECK(m.ids() == std::vector<std::string>{"a", "b"});
}

TEST_CASE("errors name the offending field") {
  CHECK(error_of([] { io::read_point_set(json::parse(R"({"pts": []})")); }).find("'points'") != std::string::npos);
  CHECK(error_of([] { io::read_point_set(json::parse(R"({"points": [[0], [1, 2]]})")); }).find("'points'") !=
        std::string::npos);
  CHECK(error_of([] { io::read_point_set(json::parse(R"({"points": [[0]], "norm": "l3"})")); }).find("'norm'") !=
        std::string::npos);
  CHECK(error_of([] { io::read_point_set(json::parse(R"({"points": [[0]], "kappa": "x"})")); }).find("'kappa'") !=
        std::string::npos);
  CHECK(error_of([] { io::read_process(json::parse(R"({"covariance": 1})")); }).find("'cov'") != std::string::npos);
  CHECK(error_of([] { io::read_ensemble(json::parse(R"({"rank_one": [[1, 0], ["x", 1]]})")); })
            .find("'rank_one[1]'") != std::string::npos);
  CHECK(error_of([] { io::read_sequence(json::parse(R"({"levels": [[[0, 1]], [[0], "1"]]})")); })
            .find("'levels[1]'") != std::string::npos);
  CHECK(error_of([] { io::read_gauge(json::parse(R"({"r": 2})")); }).find("'weights'") != std::string::npos);
  CHECK_THROWS_AS(io::load_json("/nonexistent/input.json"), InputError);
}

TEST_CASE("processes, gauges and ensembles") {
  const auto p = io::read_process(json::parse(R"({"cov": [[1, 0], [0, 1]]})"));
  CHECK(p.size() == 2);
  const auto q = io::read_process(json::parse(R"({"points": [[1, 0], [0, 1], [1, 1]]})"));
  CHECK(q.cov()(2, 2) == 2.0);
  const auto g = io::read_gauge(json::parse(R"({"weights": [1, 1], "r": "inf"})"));
  CHECK(g(Eigen::Vector2d(1, -3)) == 3.0);
  const auto e = io::read_ensemble(json::parse(R"({"rank_one": [[1, 0], [0, 2]], "ordering": [0, 1]})"));
  CHECK(e.rank_one);
  CHECK(e.ordering == std::vector<int>{0, 1});
  const auto b = io::read_ensemble(json::parse(R"({"independent_entry": [[1, 0.5], [0.5, 1]]})"));
  CHECK(b.variances.has_value());
}

TEST_CASE("sequences round trip") {
  const json in = json::parse(R"({"levels": [[[0, 1, 2]], [[0, 1], [2]], [[0], [1], [2]]]})");
  const auto seq = io::read_sequence(in);
  CHECK(seq.target == std::vector<PointIndex>{0, 1, 2});
  CHECK(audit_admissible(seq).ok);
  CHECK(io::write_sequence(seq) == in);
}

TEST_CASE("reports keep their recomputable parts") {
  BoundReport r;
  r.name = "demo";
  r.terms = {{"x", 1.0}, {"y", 2.0}};
  r.combine = Combine::kMax;
  r.scale = 3.0;
  r.extras = {{"se", 0.1}};
  r.params = {{"alpha", 2.0}};
  r.value = evaluate(r);
  const json j = io::write_report(r);
  CHECK(j["name"] == "demo");
  CHECK(j["value"] == 6.0);
  CHECK(j["components"]["y"] == 2.0);
  CHECK(j["combine"] == "max");
  CHECK(j["scale"] == 3.0);
  CHECK(j["extras"]["se"] == 0.1);
  CHECK(j["params"]["alpha"] == 2.0);
  CHECK_FALSE(j.contains("witness"));
}

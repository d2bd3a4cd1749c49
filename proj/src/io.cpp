#include "chainlab/io.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

namespace chainlab::io {

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw InputError("field '" + field + "': " + what);
}

const json& field_of(const json& j, const std::string& name) {
  if (!j.is_object()) fail(name, "enclosing value is not an object");
  auto it = j.find(name);
  if (it == j.end()) fail(name, "missing");
  return *it;
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "expected a number");
  return v.get<double>();
}

json named_object(const NamedValues& v) {
  json out = json::object();
  for (const auto& [k, x] : v) out[k] = x;
  return out;
}

const char* combine_name(Combine c) {
  switch (c) {
    case Combine::kSum: return "sum";
    case Combine::kMax: return "max";
    case Combine::kLp: return "lp";
  }
  return "?";
}

}  // namespace

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("input file '" + path + "' is not valid JSON: " + e.what());
  }
}

Eigen::VectorXd read_vector(const json& j, const std::string& field) {
  if (!j.is_array()) fail(field, "expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], field);
  return v;
}

Eigen::MatrixXd read_matrix(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) fail(field, "expected a nonempty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) fail(field, "rows must be arrays of equal length");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = number(j[i][c], field);
  }
  return m;
}

FiniteMetricSpace read_point_set(const json& j) {
  if (!j.is_object()) throw InputError("point set must be a JSON object");
  NormSpec norm = norms::Euclidean{};
  if (j.contains("norm")) {
    const json& n = j["norm"];
    if (n.is_string()) {
      const auto s = n.get<std::string>();
      if (s == "l2") norm = norms::Euclidean{};
      else if (s == "l1") norm = norms::L1{};
      else if (s == "linf") norm = norms::LInf{};
      else fail("norm", "unknown norm '" + s + "'");
    } else if (n.is_object() && n.contains("weighted_l2")) {
      const Eigen::VectorXd w = read_vector(n["weighted_l2"], "norm.weighted_l2");
      norm = norms::WeightedL2{std::vector<double>(w.data(), w.data() + w.size())};
    } else if (n.is_object() && n.contains("matrix")) {
      norm = norms::Matrix{read_matrix(n["matrix"], "norm.matrix")};
    } else {
      fail("norm", "expected \"l2\", \"l1\", \"linf\", {\"weighted_l2\": [...]} or {\"matrix\": [[...]]}");
    }
  }
  Eigen::MatrixXd coords;
  if (j.contains("points")) coords = read_matrix(j["points"], "points");
  else if (!std::holds_alternative<norms::Matrix>(norm)) fail("points", "missing");
  if (const auto* w = std::get_if<norms::WeightedL2>(&norm))
    if (static_cast<Eigen::Index>(w->weights.size()) != coords.cols())
      fail("norm.weighted_l2", "needs one weight per coordinate");
  FiniteMetricSpace base = build_space(coords, norm);
  double kappa = 1.0;
  if (j.contains("kappa")) kappa = number(j["kappa"], "kappa");
  std::vector<std::string> ids;
  if (j.contains("ids")) {
    if (!j["ids"].is_array()) fail("ids", "expected an array");
    for (const auto& v : j["ids"]) ids.push_back(v.is_string() ? v.get<std::string>() : v.dump());
  }
  return FiniteMetricSpace(base.distances(), kappa, base.coords(), std::move(ids));
}

Gauge read_gauge(const json& j) {
  const Eigen::VectorXd w = read_vector(field_of(j, "weights"), "gauge.weights");
  double r = 2.0;
  if (j.contains("r")) {
    const json& v = j["r"];
    if (v.is_string() && v.get<std::string>() == "inf") r = std::numeric_limits<double>::infinity();
    else r = number(v, "gauge.r");
  }
  return Gauge::weighted_lp(std::vector<double>(w.data(), w.data() + w.size()), r);
}

GaussianProcess read_process(const json& j) {
  if (!j.is_object()) throw InputError("process must be a JSON object");
  if (j.contains("cov")) return GaussianProcess(read_matrix(j["cov"], "cov"));
  if (j.contains("points")) {
    if (j.contains("embed") && j["embed"] != "l2") fail("embed", "only \"l2\" is supported");
    return GaussianProcess::from_points(read_matrix(j["points"], "points"));
  }
  throw InputError("field 'cov': missing (or give 'points')");
}

CoefficientEnsemble read_ensemble(const json& j) {
  if (!j.is_object()) throw InputError("ensemble must be a JSON object");
  CoefficientEnsemble ens;
  if (j.contains("matrices")) {
    const json& m = j["matrices"];
    if (!m.is_array() || m.empty()) fail("matrices", "expected a nonempty array of matrices");
    std::vector<Eigen::MatrixXd> mats;
    for (std::size_t k = 0; k < m.size(); ++k) mats.push_back(read_matrix(m[k], "matrices[" + std::to_string(k) + "]"));
    ens = ensemble_from_matrices(std::move(mats));
  } else if (j.contains("rank_one")) {
    const json& r = j["rank_one"];
    if (!r.is_array() || r.empty()) fail("rank_one", "expected a nonempty array of vectors");
    std::vector<Eigen::VectorXd> vecs;
    for (std::size_t k = 0; k < r.size(); ++k) vecs.push_back(read_vector(r[k], "rank_one[" + std::to_string(k) + "]"));
    ens = ensemble_from_rank_one(vecs);
  } else if (j.contains("independent_entry")) {
    ens = ensemble_from_variances(read_matrix(j["independent_entry"], "independent_entry"));
  } else {
    throw InputError("field 'matrices': missing (or give 'rank_one' / 'independent_entry')");
  }
  if (j.contains("ordering")) {
    const json& o = j["ordering"];
    if (!o.is_array()) fail("ordering", "expected an array of indices");
    std::vector<int> ord;
    for (const auto& v : o) {
      if (!v.is_number_integer()) fail("ordering", "expected integers");
      ord.push_back(v.get<int>());
    }
    set_ordering(ens, std::move(ord));
  }
  return ens;
}

AdmissibleSequence read_sequence(const json& j) {
  const json& levels = field_of(j, "levels");
  if (!levels.is_array() || levels.empty()) fail("levels", "expected a nonempty array of partitions");
  AdmissibleSequence seq;
  for (std::size_t n = 0; n < levels.size(); ++n) {
    const std::string name = "levels[" + std::to_string(n) + "]";
    if (!levels[n].is_array()) fail(name, "expected an array of cells");
    Partition part;
    for (const auto& cell : levels[n]) {
      if (!cell.is_array()) fail(name, "cells must be arrays of indices");
      Cell c;
      for (const auto& v : cell) {
        if (!v.is_number_integer()) fail(name, "indices must be integers");
        c.push_back(v.get<PointIndex>());
      }
      part.push_back(std::move(c));
    }
    seq.levels.push_back(std::move(part));
  }
  for (const auto& cell : seq.levels.front()) seq.target.insert(seq.target.end(), cell.begin(), cell.end());
  std::sort(seq.target.begin(), seq.target.end());
  return seq;
}

json write_sequence(const AdmissibleSequence& seq) {
  json levels = json::array();
  for (const auto& part : seq.levels) {
    json p = json::array();
    for (const auto& cell : part) p.push_back(cell);
    levels.push_back(std::move(p));
  }
  return json{{"levels", std::move(levels)}};
}

json write_report(const BoundReport& r) {
  json out;
  out["name"] = r.name;
  out["value"] = r.value;
  out["components"] = named_object(r.terms);
  out["combine"] = combine_name(r.combine);
  if (r.combine == Combine::kLp) out["exponent"] = r.exponent;
  if (r.scale != 1.0) out["scale"] = r.scale;
  out["extras"] = named_object(r.extras);
  out["params"] = named_object(r.params);
  out["diagnostics"] = r.diagnostics;
  if (r.witness) out["witness"] = write_sequence(*r.witness);
  return out;
}

}  // namespace chainlab::io

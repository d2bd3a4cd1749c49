#pragma once

#include <string>

#include <json.hpp>

#include "chainlab/bounds.hpp"
#include "chainlab/gaussian.hpp"
#include "chainlab/geometry.hpp"
#include "chainlab/matrix_bounds.hpp"
#include "chainlab/metric.hpp"
#include "chainlab/partitions.hpp"

namespace chainlab::io {

using nlohmann::json;

/// Parses a file; malformed JSON becomes an InputError naming the path.
json load_json(const std::string& path);

/// {"points": [[...]], "norm": "l2"|"l1"|"linf"|{"weighted_l2":[...]}|{"matrix":[[...]]},
///  optional "kappa", optional "ids"}. With a matrix norm "points" may be omitted.
FiniteMetricSpace read_point_set(const json& j);

/// {"weights": [...], "r": number or "inf"}
Gauge read_gauge(const json& j);

/// {"cov": [[...]]} or {"points": [[...]], "embed": "l2"}
GaussianProcess read_process(const json& j);

/// {"matrices": [...]} | {"rank_one": [...]} | {"independent_entry": [[...]]}, optional "ordering".
CoefficientEnsemble read_ensemble(const json& j);

/// {"levels": [[[idx,...],...],...]}; the target is the union of level 0.
AdmissibleSequence read_sequence(const json& j);
json write_sequence(const AdmissibleSequence& seq);

/// {"name", "value", "components", "params", ...}
json write_report(const BoundReport& r);

Eigen::MatrixXd read_matrix(const json& j, const std::string& field);
Eigen::VectorXd read_vector(const json& j, const std::string& field);

}  // namespace chainlab::io

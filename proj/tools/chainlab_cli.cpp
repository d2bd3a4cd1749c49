// chainlab command-line runner: reads JSON instances, writes CSV or JSON reports.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chainlab/bounds.hpp"
#include "chainlab/entropy.hpp"
#include "chainlab/gaussian.hpp"
#include "chainlab/geometry.hpp"
#include "chainlab/interpolation.hpp"
#include "chainlab/io.hpp"
#include "chainlab/matrix_bounds.hpp"
#include "chainlab/parallel.hpp"
#include "chainlab/partitions.hpp"

using namespace chainlab;
using io::json;

namespace {

struct Config {
  std::string command;
  std::string input;
  std::string out;
  std::string format;
  std::string method = "auto";
  double alpha = 2.0;
  double p = 1.0;
  double q = 1.0;
  double a = 1.0;
  double eta = 0.25;
  double m_const = 1.0;
  double t = 1.0;
  std::optional<double> kappa;
  int d = 6;
  int n_max = -1;
  std::size_t samples = 20000;
  std::optional<std::uint64_t> seed;

  json echo() const {
    json j;
    j["alpha"] = alpha;
    j["p"] = p;
    j["q"] = q;
    j["a"] = a;
    j["eta"] = eta;
    j["m_const"] = m_const;
    j["samples"] = samples;
    j["seed"] = seed ? json(*seed) : json(nullptr);
    j["n_max"] = n_max;
    j["method"] = method;
    j["input"] = input;
    if (kappa) j["kappa"] = *kappa;
    if (command == "ellipsoid-demo") {
      j["d"] = d;
      j["t"] = t;
    }
    return j;
  }
};

/// Extra CSV rows that are not bound reports (measurements, table entries).
struct Row {
  std::string name;
  double value = 0.0;
  std::optional<double> se;
  std::optional<std::size_t> samples;
};

struct Instance {
  std::string id;
  std::vector<BoundReport> reports;
  std::vector<Row> rows;
  json extra = json::object();
  bool violation = false;
};

EntropyMethod parse_method(const std::string& s) {
  if (s == "auto") return EntropyMethod::kAuto;
  if (s == "exact") return EntropyMethod::kExact;
  if (s == "greedy") return EntropyMethod::kGreedy;
  if (s == "search") return EntropyMethod::kExactSearch;
  throw InputError("field 'method': expected auto, exact, greedy or search");
}

bool has_violation(const BoundReport& r) {
  for (const auto& d : r.diagnostics)
    if (d.rfind("low confidence", 0) != 0) return true;
  return false;
}

void require_seed(const Config& c) {
  if (!c.seed) throw InputError("field 'seed': required for stochastic subcommands (--seed)");
}

BoundReport single_value(std::string name, double v, NamedValues extras = {}, NamedValues params = {}) {
  BoundReport r;
  r.name = std::move(name);
  r.terms = {{"value", v}};
  r.extras = std::move(extras);
  r.params = std::move(params);
  r.value = evaluate(r);
  return r;
}

std::vector<PointIndex> all_points(const FiniteMetricSpace& s) {
  std::vector<PointIndex> v(s.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<PointIndex>(i);
  return v;
}

// ---- subcommands: each turns one JSON instance into reports ----

Instance run_metric_check(const Config& c, const json& in) {
  const FiniteMetricSpace s = io::read_point_set(in);
  const double kappa = c.kappa.value_or(s.quasi_constant());
  const auto bad = check_metric(s, kappa);
  Instance out;
  out.rows = {{"violations", static_cast<double>(bad.size())},
              {"diameter", diam(SubsetView::all(s))},
              {"kappa", kappa},
              {"points", static_cast<double>(s.size())}};
  json triples = json::array();
  for (std::size_t k = 0; k < std::min<std::size_t>(bad.size(), 20); ++k)
    triples.push_back({bad[k].i, bad[k].j, bad[k].k});
  out.extra["violating_triples"] = triples;
  out.violation = !bad.empty();
  return out;
}

Instance run_entropy(const Config& c, const json& in) {
  const FiniteMetricSpace s = io::read_point_set(in);
  const SubsetView t = SubsetView::all(s);
  const EntropyMethod method = parse_method(c.method);
  int top = std::min(levels_to_resolve(t.size()), kMaxEntropyLevel);
  if (c.n_max >= 0) top = std::min(top, c.n_max);
  Instance out;
  for (int n = 0; n <= top; ++n) {
    const EntropyResult e = entropy_number(t, n, method);
    out.reports.push_back(single_value("e_" + std::to_string(n), e.value,
                                       {{"net_size", static_cast<double>(e.net.size())}, {"exact", e.exact ? 1.0 : 0.0}},
                                       {{"n", static_cast<double>(n)}}));
    json net = e.net;
    out.extra["nets"].push_back(net);
  }
  return out;
}

Instance run_gamma(const Config& c, const json& in) {
  const FiniteMetricSpace s = io::read_point_set(in);
  const SubsetView t = SubsetView::all(s);
  const EntropyMethod method = parse_method(c.method);
  Instance out;
  out.reports.push_back(sudakov_bound(t, c.alpha, method));
  out.reports.push_back(dudley_bound(t, c.alpha, c.p, method));
  out.reports.push_back(local_dudley_bound(t, c.alpha, c.p, c.a, method));
  if (t.size() <= kGammaExactLimit) {
    const int n_max = c.n_max < 0 ? 2 : std::min(c.n_max, 2);
    GammaResult g = gamma_exact(s, t, c.alpha, c.p, n_max);
    BoundReport r = single_value("gamma_exact", g.value, {}, {{"alpha", c.alpha}, {"p", c.p}});
    r.witness = std::move(g.witness);
    out.reports.push_back(std::move(r));
  }
  return out;
}

InterpolationProblem read_problem(const json& in, const FiniteMetricSpace& s, double q) {
  const json& pen = in.contains("penalty") ? in["penalty"] : throw InputError("field 'penalty': missing");
  if (!pen.is_array() || pen.size() != s.size()) throw InputError("field 'penalty': needs one entry per point");
  std::vector<double> f;
  for (const auto& v : pen) {
    if (v.is_null()) f.push_back(kExcluded);
    else if (v.is_number()) f.push_back(v.get<double>());
    else throw InputError("field 'penalty': entries must be numbers or null");
  }
  std::vector<PointIndex> target;
  if (in.contains("target")) {
    if (!in["target"].is_array()) throw InputError("field 'target': expected an array of indices");
    for (const auto& v : in["target"]) {
      if (!v.is_number_integer()) throw InputError("field 'target': expected integers");
      target.push_back(v.get<PointIndex>());
    }
  } else {
    for (std::size_t i = 0; i < f.size(); ++i)
      if (std::isfinite(f[i])) target.push_back(static_cast<PointIndex>(i));
  }
  if (in.contains("q")) {
    if (!in["q"].is_number()) throw InputError("field 'q': expected a number");
    q = in["q"].get<double>();
  }
  return InterpolationProblem(s, std::move(f), q, std::move(target));
}

Instance run_interpolate(const Config& c, const json& in) {
  const FiniteMetricSpace s = io::read_point_set(in);
  const InterpolationProblem prob = read_problem(in, s, c.q);
  const EntropyMethod method = parse_method(c.method);
  Instance out;
  if (prob.q == 1.0) out.reports.push_back(interpolation_bound(prob, c.alpha, c.a, c.n_max, method));
  const int n_max = c.n_max < 0 ? default_n_max(prob.target.size()) : c.n_max;
  const TelescopingReport tel = telescoping_check(prob, c.alpha, c.a, n_max);
  out.reports.push_back(single_value("telescoping_max_ratio", tel.max_ratio, {{"constant", tel.constant}},
                                     {{"alpha", c.alpha}, {"a", c.a}, {"q", prob.q}}));
  json sets = json::array();
  for (int n = 0; n <= n_max; ++n) sets.push_back(interpolation_set(prob, c.a * level_scale(n, c.alpha)));
  out.extra["interpolation_sets"] = sets;
  out.violation = tel.max_ratio > 1.0;
  return out;
}

Instance run_lattice(const Config& c, const json& in) {
  const FiniteMetricSpace s = io::read_point_set(in);
  const SubsetView t = SubsetView::all(s);
  const EntropyMethod method = parse_method(c.method);
  Instance out;
  out.reports.push_back(sudakov_bound(t, c.alpha, method));
  out.reports.push_back(lattice_bound(t, c.alpha, c.q, c.m_const, method));
  if (in.contains("gauge")) {
    const Gauge gauge = io::read_gauge(in["gauge"]);
    if (!s.has_coords() || s.coords().cols() != gauge.dim())
      throw InputError("field 'gauge': dimension must match the points");
    std::vector<double> f(s.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = gauge(s.coords().row(static_cast<Eigen::Index>(i)).transpose());
    const InterpolationProblem prob(s, f, c.q, all_points(s));
    // lattice split bound on the geometric condition: L = 2^q
    out.reports.push_back(geom_pipeline(prob, c.alpha, c.p, c.q, std::exp2(c.q), method));
    std::vector<double> ts;
    for (int n = 0; n <= default_n_max(s.size()); ++n) ts.push_back(c.a * level_scale(n, c.alpha));
    const GeometryEstimate lcond = estimate_geom_condition(prob, gauge, c.q, ts);
    out.rows.push_back({"geom_condition_estimate", lcond.value, std::nullopt, lcond.used});
    if (c.seed) {
      const GeometryEstimate m = estimate_lower_q(gauge, c.q, c.samples, *c.seed);
      out.rows.push_back({"lower_q_estimate", m.value, std::nullopt, m.used});
    }
    if (const auto m = gauge.analytic_lower_q(c.q)) out.rows.push_back({"lower_q_analytic", *m});
  }
  for (const auto& r : out.reports) out.violation = out.violation || has_violation(r);
  return out;
}

Instance run_gaussian(const Config& c, const json& in) {
  require_seed(c);
  const GaussianProcess proc = io::read_process(in);
  const FiniteMetricSpace metric = proc.natural_metric();
  Instance out;
  out.reports.push_back(sudakov_bound(SubsetView::all(metric), 2.0, parse_method(c.method)));
  MmPipelineResult mm = mm_pipeline(proc, c.a, c.samples, *c.seed);
  out.rows.push_back({"g_hat", mm.g_total.mean, mm.g_total.se, mm.g_total.samples});
  out.violation = has_violation(mm.report);
  out.reports.push_back(std::move(mm.report));
  return out;
}

Instance run_matrix(const Config& c, const json& in) {
  require_seed(c);
  const CoefficientEnsemble ens = io::read_ensemble(in);
  Instance out;
  out.reports.push_back(matrix_closed_bound(ens, MatrixBound::kRudelson));
  if (ens.rank_one) out.reports.push_back(matrix_closed_bound(ens, MatrixBound::kDimensionFree));
  if (ens.psd) {
    out.reports.push_back(matrix_closed_bound(ens, MatrixBound::kSupernck, c.samples, *c.seed));
    const Eigen::MatrixXd ball = sphere_discretization(ens.dim, 200, *c.seed);
    out.reports.push_back(gordon_bound(ens, ball, c.eta, 200, *c.seed));
  }
  const McEstimate mc = mc_spectral_norm(ens, c.samples, *c.seed);
  out.rows.push_back({"mc_norm", mc.mean, mc.se, mc.samples});
  if (ens.variances) {
    const McEstimate rows = row_norm_lower(*ens.variances, c.samples, *c.seed);
    out.rows.push_back({"row_norm_lower", rows.mean, rows.se, rows.samples});
  }
  out.extra["ordering"] = ens.ordering;
  out.extra["psd"] = ens.psd;
  out.extra["rank_one"] = ens.rank_one;
  return out;
}

/// Golden-section minimization of k y^2 + t^2 (x - y)^2 over y between 0 and x.
double coordinate_oracle(int k, double t, double x) {
  const auto g = [&](double y) { return k * y * y + t * t * (x - y) * (x - y); };
  double lo = std::min(0.0, x), hi = std::max(0.0, x);
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double m1 = hi - r * (hi - lo), m2 = lo + r * (hi - lo);
    if (g(m1) <= g(m2)) hi = m2;
    else lo = m1;
  }
  return 0.5 * (lo + hi);
}

Instance run_ellipsoid(const Config& c) {
  if (c.d < 1) throw InputError("field 'd': must be >= 1");
  if (!(c.t >= 0.0)) throw InputError("field 't': must be >= 0");
  const Eigen::VectorXd x = Eigen::VectorXd::Ones(c.d);
  const EllipsoidProjection e = ellipsoid_closed_form(c.t, x);
  Instance out;
  double worst_rel = 0.0, worst_res = 0.0;
  json table = json::array();
  for (int k = 0; k < c.d; ++k) {
    const double oracle = coordinate_oracle(k + 1, c.t, x(k));
    const double rel = oracle != 0.0 ? std::abs(e.pi(k) - oracle) / std::abs(oracle) : std::abs(e.pi(k));
    worst_rel = std::max(worst_rel, rel);
    worst_res = std::max(worst_res, std::abs(e.residual(k)));
    out.rows.push_back({"pi_" + std::to_string(k + 1), e.pi(k)});
    table.push_back({{"k", k + 1},
                     {"x", x(k)},
                     {"pi", e.pi(k)},
                     {"oracle", oracle},
                     {"weight", e.weights_infinite ? json("inf") : json(e.weights(k))},
                     {"residual", e.residual(k)}});
  }
  out.rows.push_back({"oracle_max_rel_error", worst_rel});
  out.rows.push_back({"max_residual", worst_res});
  out.extra["table"] = table;
  return out;
}

// ---- output ----

std::string instance_id(const json& in, std::size_t k) {
  if (!in.is_object() || !in.contains("id")) return std::to_string(k);
  return in["id"].is_string() ? in["id"].get<std::string>() : in["id"].dump();
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

void write_csv(std::ostream& os, const Config& c, const std::vector<Instance>& instances) {
  os << "# chainlab " << c.command << ' ' << c.echo().dump() << '\n';
  os << "instance_id,bound_name,value,se,samples,alpha,p,q,a,eta,m_const,seed\n";
  const std::string tail = ',' + num(c.alpha) + ',' + num(c.p) + ',' + num(c.q) + ',' + num(c.a) + ',' +
                           num(c.eta) + ',' + num(c.m_const) + ',' + (c.seed ? std::to_string(*c.seed) : "");
  auto emit = [&](const std::string& id, const Row& r) {
    os << csv_field(id) << ',' << csv_field(r.name) << ',' << num(r.value) << ','
       << (r.se ? num(*r.se) : "") << ',' << (r.samples ? std::to_string(*r.samples) : "") << tail << '\n';
  };
  for (const auto& inst : instances) {
    for (const auto& rep : inst.reports) {
      Row row{rep.name, rep.value};
      if (auto se = find_value(rep.extras, "se")) row.se = *se;
      if (auto se = find_value(rep.extras, "g_se")) row.se = *se;
      if (auto n = find_value(rep.extras, "samples")) row.samples = static_cast<std::size_t>(*n);
      emit(inst.id, row);
    }
    for (const auto& r : inst.rows) emit(inst.id, r);
  }
}

void write_json(std::ostream& os, const Config& c, const std::vector<Instance>& instances) {
  json doc;
  doc["command"] = c.command;
  doc["config"] = c.echo();
  json list = json::array();
  for (const auto& inst : instances) {
    json j;
    j["instance_id"] = inst.id;
    j["reports"] = json::array();
    for (const auto& r : inst.reports) j["reports"].push_back(io::write_report(r));
    j["measurements"] = json::array();
    for (const auto& r : inst.rows) {
      json m{{"name", r.name}, {"value", r.value}};
      if (r.se) m["se"] = *r.se;
      if (r.samples) m["samples"] = *r.samples;
      j["measurements"].push_back(std::move(m));
    }
    for (auto it = inst.extra.begin(); it != inst.extra.end(); ++it) j[it.key()] = it.value();
    list.push_back(std::move(j));
  }
  doc["instances"] = std::move(list);
  os << doc.dump(2) << '\n';
}

int run(Config& c) {
  using Handler = Instance (*)(const Config&, const json&);
  static const std::map<std::string, Handler> handlers{
      {"metric-check", run_metric_check}, {"entropy", run_entropy},         {"gamma", run_gamma},
      {"interpolate", run_interpolate},   {"lattice", run_lattice},         {"gaussian-sandwich", run_gaussian},
      {"matrix-bounds", run_matrix},
  };
  if (c.format.empty()) {
    const bool csv = c.command == "gamma" || c.command == "entropy" || c.command == "metric-check" ||
                     c.command == "lattice" || c.command == "interpolate";
    c.format = csv ? "csv" : "json";
  }
  if (c.format != "csv" && c.format != "json") throw InputError("field 'format': expected csv or json");

  std::vector<Instance> instances;
  if (c.command == "ellipsoid-demo") {
    instances.push_back(run_ellipsoid(c));
    instances.back().id = "0";
  } else {
    if (c.input.empty()) throw InputError("field 'input': required for " + c.command);
    const json doc = io::load_json(c.input);
    const Handler h = handlers.at(c.command);
    // a top-level array holds several instances
    const std::vector<json> items = doc.is_array() ? doc.get<std::vector<json>>() : std::vector<json>{doc};
    for (std::size_t k = 0; k < items.size(); ++k) {
      instances.push_back(h(c, items[k]));
      instances.back().id = instance_id(items[k], k);
    }
  }

  std::ostringstream buf;
  if (c.format == "csv") write_csv(buf, c, instances);
  else write_json(buf, c, instances);
  if (c.out.empty()) {
    std::cout << buf.str();
  } else {
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw InputError("field 'out': cannot write '" + c.out + "'");
    f << buf.str();
  }
  bool violation = false;
  for (const auto& inst : instances) {
    violation = violation || inst.violation;
    for (const auto& r : inst.reports) violation = violation || has_violation(r);
  }
  return violation ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  apply_worker_cap_from_env();
  Config c;
  CLI::App app{"chainlab: chaining bounds, partitions and Monte Carlo certificates"};
  app.require_subcommand(1);
  const std::vector<std::pair<std::string, std::string>> commands{
      {"metric-check", "check the (quasi-)triangle inequality of a point set"},
      {"entropy", "entropy numbers e_n of a point set"},
      {"gamma", "Sudakov, Dudley, local Dudley and exact gamma"},
      {"interpolate", "interpolation bound and telescoping check for a penalty"},
      {"lattice", "lattice bound and the geometric pipeline"},
      {"gaussian-sandwich", "Sudakov vs Monte Carlo width vs majorizing-measure witness"},
      {"matrix-bounds", "structured Gaussian matrix norm bounds"},
      {"ellipsoid-demo", "closed-form ellipsoid projection table"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--input", c.input, "input JSON file");
    sub->add_option("--out", c.out, "output file (default stdout)");
    sub->add_option("--format", c.format, "csv or json");
    sub->add_option("--alpha", c.alpha, "alpha");
    sub->add_option("--p", c.p, "p");
    sub->add_option("--q", c.q, "q");
    sub->add_option("--a", c.a, "a");
    sub->add_option("--eta", c.eta, "eta");
    sub->add_option("--m-const", c.m_const, "lower q-estimate constant M");
    sub->add_option("--samples", c.samples, "Monte Carlo samples");
    sub->add_option("--seed", c.seed, "random seed");
    sub->add_option("--n-max", c.n_max, "highest level");
    sub->add_option("--method", c.method, "entropy method: auto, exact, greedy, search");
    sub->add_option("--kappa", c.kappa, "quasi-metric constant (metric-check)");
    sub->add_option("--d", c.d, "dimension (ellipsoid-demo)");
    sub->add_option("--t", c.t, "t (ellipsoid-demo)");
    sub->callback([&c, n = name] { c.command = n; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  try {
    return run(c);
  } catch (const InputError& e) {
    std::cerr << "chainlab: error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "chainlab: error: " << e.what() << '\n';
    return 1;
  }
}

#include "chainlab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace chainlab {

double evaluate(const BoundReport& r) {
  double c = 0.0;
  switch (r.combine) {
    case Combine::kSum:
      for (const auto& [k, v] : r.terms) c += v;
      break;
    case Combine::kMax:
      for (const auto& [k, v] : r.terms) c = std::max(c, v);
      break;
    case Combine::kLp:
      for (const auto& [k, v] : r.terms) c += std::pow(v, r.exponent);
      c = std::pow(c, 1.0 / r.exponent);
      break;
  }
  return r.scale * c;
}

std::optional<double> find_value(const NamedValues& v, const std::string& key) {
  for (const auto& [k, x] : v)
    if (k == key) return x;
  return std::nullopt;
}

namespace {

std::string level_key(int n) { return "n=" + std::to_string(n); }

void check_alpha_p(double alpha, double p) {
  if (!(alpha > 0.0)) throw InputError("alpha must be positive");
  if (!(p >= 1.0)) throw InputError("p must be >= 1");
}

std::vector<std::string> describe(const BuildResult& b) {
  std::vector<std::string> out;
  for (const auto& d : b.diagnostics) {
    std::ostringstream s;
    s.precision(17);
    s << "level " << d.level << " segment " << d.segment << " of cell " << d.cell << ": " << d.size
      << " points need more than " << d.budget << " pieces of diameter <= " << d.max_diam;
    out.push_back(s.str());
  }
  if (!b.violations.empty())
    out.push_back("diameter recursion fails at " + std::to_string(b.violations.size()) + " (level, point) pairs");
  if (!b.audit.ok) out.push_back("admissibility audit failed: " + b.audit.problem);
  return out;
}

double sup_scaled_entropy(const std::vector<EntropyResult>& prof, double alpha) {
  double s = 0.0;
  for (const auto& e : prof) s = std::max(s, level_scale(e.n, alpha) * e.value);
  return s;
}

double entropy_at(const std::vector<EntropyResult>& prof, int n) {
  return static_cast<std::size_t>(n) < prof.size() ? prof[static_cast<std::size_t>(n)].value : 0.0;
}

SubsetView target_view(const InterpolationProblem& prob) { return SubsetView(*prob.ground, prob.target); }

/// d(x, pi_{a 2^{n/alpha}}(x)) for n = 0..n_max, by global index.
Eigen::MatrixXd projection_errors(const InterpolationProblem& prob, double alpha, double a, int n_max) {
  const auto& space = *prob.ground;
  Eigen::MatrixXd err = Eigen::MatrixXd::Zero(n_max + 1, static_cast<Eigen::Index>(space.size()));
  for (int n = 0; n <= n_max; ++n) {
    const double t = a * level_scale(n, alpha);
    for (PointIndex x : prob.target) err(n, x) = space(x, k_functional(prob, t, x).minimizer);
  }
  return err;
}

BoundReport witness_report(std::string name, const FiniteMetricSpace& space, BuildResult build, double alpha,
                           double p) {
  BoundReport r;
  r.name = std::move(name);
  r.terms = {{"witness_value", value(space, build.seq, alpha, p)}};
  r.extras = {{"diagnostic_segments", static_cast<double>(build.diagnostics.size())},
              {"recursion_violations", static_cast<double>(build.violations.size())},
              {"admissible", build.audit.ok ? 1.0 : 0.0},
              {"levels", static_cast<double>(build.seq.levels.size())}};
  r.diagnostics = describe(build);
  r.witness = std::move(build.seq);
  r.params = {{"alpha", alpha}, {"p", p}};
  r.value = evaluate(r);
  return r;
}

void compare_to_closed_form(BoundReport& r, double closed) {
  r.extras.emplace_back("closed_form", closed);
  const double ratio = closed > 0.0 ? r.value / closed : (r.value > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  r.extras.emplace_back("ratio_to_closed_form", ratio);
  if (ratio > kConstantCeiling) r.diagnostics.push_back("witness exceeds 64 x closed form");
}

}  // namespace

std::vector<EntropyResult> entropy_profile(const SubsetView& t, EntropyMethod method) {
  std::vector<EntropyResult> out;
  if (t.empty()) return out;
  const int top = std::min(levels_to_resolve(t.size()), kMaxEntropyLevel);
  for (int n = 0; n <= top; ++n) out.push_back(entropy_number(t, n, method));
  return out;
}

BoundReport dudley_bound(const SubsetView& t, double alpha, double p, EntropyMethod method) {
  check_alpha_p(alpha, p);
  BoundReport r;
  r.name = "dudley";
  r.combine = Combine::kLp;
  r.exponent = p;
  for (const auto& e : entropy_profile(t, method)) r.terms.emplace_back(level_key(e.n), level_scale(e.n, alpha) * e.value);
  r.params = {{"alpha", alpha}, {"p", p}};
  r.value = evaluate(r);
  return r;
}

BoundReport sudakov_bound(const SubsetView& t, double alpha, EntropyMethod method) {
  check_alpha_p(alpha, 1.0);
  BoundReport r;
  r.name = "sudakov";
  r.combine = Combine::kMax;
  for (const auto& e : entropy_profile(t, method)) r.terms.emplace_back(level_key(e.n), level_scale(e.n, alpha) * e.value);
  r.params = {{"alpha", alpha}};
  r.value = evaluate(r);
  return r;
}

BoundReport local_dudley_bound(const SubsetView& t, double alpha, double p, double a, EntropyMethod method) {
  check_alpha_p(alpha, p);
  if (!(a > 0.0)) throw InputError("a must be positive");
  BoundReport r;
  r.name = "local_dudley";
  r.combine = Combine::kMax;
  const int top = t.empty() ? -1 : std::min(levels_to_resolve(t.size()), kMaxEntropyLevel);
  for (PointIndex x : t.indices()) {
    double sum = 0.0;
    for (int n = 0; n <= top; ++n) sum += std::pow(level_scale(n, alpha) * local_entropy(t, n, a, x, method), p);
    r.terms.emplace_back("x=" + t.space().ids()[static_cast<std::size_t>(x)], std::pow(sum, 1.0 / p));
  }
  r.params = {{"alpha", alpha}, {"p", p}, {"a", a}};
  r.value = evaluate(r);
  return r;
}

BoundReport interpolation_bound(const InterpolationProblem& prob, double alpha, double a, int n_max,
                                EntropyMethod method) {
  check_alpha_p(alpha, 1.0);
  if (prob.q != 1.0) throw InputError("interpolation_bound needs the linear variant (q = 1)");
  if (!(a > 0.0)) throw InputError("a must be positive");
  const auto& space = *prob.ground;
  if (n_max < 0) n_max = prob.target.empty() ? 0 : std::min(levels_to_resolve(prob.target.size()), kMaxEntropyLevel);
  BoundReport r;
  r.name = "interpolation";
  double sup_f = 0.0;
  for (PointIndex x : prob.target) sup_f = std::max(sup_f, prob.penalty[static_cast<std::size_t>(x)]);
  r.terms.emplace_back("penalty", sup_f / a);
  for (int n = 0; n <= n_max && !prob.target.empty(); ++n) {
    const SubsetView k_t(space, interpolation_set(prob, a * level_scale(n, alpha)));
    r.terms.emplace_back(level_key(n), level_scale(n, alpha) * entropy_number(k_t, n, method).value);
    r.extras.emplace_back("|K_t| " + level_key(n), static_cast<double>(k_t.size()));
  }
  r.params = {{"alpha", alpha}, {"a", a}};
  r.value = evaluate(r);
  return r;
}

BoundReport lattice_bound(const SubsetView& t, double alpha, double q, double m_const, EntropyMethod method) {
  check_alpha_p(alpha, 1.0);
  if (!(q >= 1.0)) throw InputError("q must be >= 1");
  if (!(m_const > 0.0)) throw InputError("M must be positive");
  BoundReport r;
  r.name = "lattice";
  r.scale = m_const;
  if (q == 1.0) {
    r.combine = Combine::kMax;
  } else {
    r.combine = Combine::kLp;
    r.exponent = q / (q - 1.0);
  }
  for (const auto& e : entropy_profile(t, method)) r.terms.emplace_back(level_key(e.n), level_scale(e.n, alpha) * e.value);
  r.params = {{"alpha", alpha}, {"q", q}, {"m_const", m_const}};
  r.value = evaluate(r);
  return r;
}

BoundReport qconvex_bound(const SubsetView& t, double alpha, double q, double eta, EntropyMethod method) {
  check_alpha_p(alpha, 1.0);
  if (!(q >= 1.0)) throw InputError("q must be >= 1");
  if (!(eta > 0.0)) throw InputError("eta must be positive");
  BoundReport r;
  r.name = "qconvex";
  r.scale = std::pow(eta, -1.0 / q);
  r.combine = Combine::kMax;
  for (const auto& e : entropy_profile(t, method)) r.terms.emplace_back(level_key(e.n), level_scale(e.n, alpha) * e.value);
  r.params = {{"alpha", alpha}, {"q", q}, {"eta", eta}};
  r.value = evaluate(r);
  return r;
}

BoundReport plain_pipeline(const SubsetView& t, const ControlMatrix& ctrl, double alpha, double p, int n_max) {
  check_alpha_p(alpha, p);
  BuildResult b = contraction_build(t.space(), t, ctrl, alpha, n_max);
  BoundReport r = witness_report("plain_pipeline", t.space(), std::move(b), alpha, p);
  r.params.emplace_back("a", ctrl.a);
  return r;
}

std::vector<double> a_grid() {
  std::vector<double> out;
  for (int k = -24; k <= 24; ++k) out.push_back(std::pow(10.0, k / 8.0));
  return out;
}

BoundReport geom_pipeline(const InterpolationProblem& prob, double alpha, double p, double q, double l_const,
                          EntropyMethod method) {
  check_alpha_p(alpha, p);
  if (!(q >= 1.0)) throw InputError("q must be >= 1");
  if (!(l_const > 0.0)) throw InputError("L must be positive");
  const auto& space = *prob.ground;
  const SubsetView t = target_view(prob);
  if (t.empty()) throw InputError("target set is empty");
  const auto prof = entropy_profile(t, method);
  const double s_sup = sup_scaled_entropy(prof, alpha);
  const int n_max = default_n_max(t.size());
  const double c = kPipelineC;

  auto build_at = [&](double a) {
    ControlMatrix ctrl;
    ctrl.a = c;
    const Eigen::MatrixXd err = projection_errors(prob, alpha, a, n_max);
    ctrl.s = (2.0 * c + 1.0) * err;
    if (q > 1.0) {
      const double pe = q / (q - 1.0);
      for (int n = 0; n <= n_max; ++n) {
        const double young = std::pow(l_const * a / c, pe / q) * std::exp2(n * pe / (alpha * q)) *
                             std::pow(entropy_at(prof, n), pe);
        for (PointIndex x : prob.target) ctrl.s(n, x) += young;
      }
    }
    return witness_report("geom_pipeline", space, contraction_build(space, t, ctrl, alpha, n_max), alpha, p);
  };

  BoundReport best;
  double best_a = 0.0;
  if (s_sup == 0.0) {
    best = build_at(1.0);
    best_a = std::numeric_limits<double>::infinity();
  } else if (q == 1.0) {
    best_a = c / (l_const * s_sup);
    best = build_at(best_a);
  } else {
    bool first = true;
    for (double a : a_grid()) {
      BoundReport r = build_at(a);
      if (first || r.value < best.value) {
        best = std::move(r);
        best_a = a;
        first = false;
      }
    }
  }
  best.params.emplace_back("q", q);
  best.params.emplace_back("L", l_const);
  best.params.emplace_back("a", best_a);
  best.extras.emplace_back("S", s_sup);
  double closed = l_const * s_sup;
  if (q > 1.0) {
    const double pe = q / (q - 1.0);
    double sum = 0.0;
    for (const auto& e : prof) sum += std::pow(level_scale(e.n, alpha) * e.value, pe);
    closed = std::pow(l_const, 1.0 / q) * std::pow(sum, 1.0 / pe);
  }
  compare_to_closed_form(best, closed);
  return best;
}

BoundReport ucvx_pipeline(const InterpolationProblem& prob, double alpha, double eta, EntropyMethod method) {
  const double q = prob.q;
  check_alpha_p(alpha, q);
  if (!(q >= 2.0)) throw InputError("ucvx pipeline needs q >= 2");
  if (!(eta > 0.0)) throw InputError("eta must be positive");
  const auto& space = *prob.ground;
  const SubsetView t = target_view(prob);
  if (t.empty()) throw InputError("target set is empty");
  const auto prof = entropy_profile(t, method);
  const double s_sup = std::pow(eta, -1.0 / q) * sup_scaled_entropy(prof, alpha);
  const int n_max = default_n_max(t.size());
  const double c = kPipelineC;
  const double a = s_sup > 0.0 ? c / s_sup : 1.0;
  ControlMatrix ctrl;
  ctrl.a = c;
  ctrl.s = (4.0 * c + 1.0) * projection_errors(prob, alpha, a, n_max);
  BoundReport r = witness_report("ucvx_pipeline", space, contraction_build(space, t, ctrl, alpha, n_max), alpha, q);
  r.params.emplace_back("q", q);
  r.params.emplace_back("eta", eta);
  r.params.emplace_back("a", a);
  r.extras.emplace_back("S", s_sup);
  compare_to_closed_form(r, s_sup);
  return r;
}

}  // namespace chainlab

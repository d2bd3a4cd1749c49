#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chainlab/entropy.hpp"
#include "chainlab/interpolation.hpp"
#include "chainlab/partitions.hpp"

namespace chainlab {

/// How a report's value follows from its terms: value = scale * combine(terms).
enum class Combine { kSum, kMax, kLp };

using NamedValues = std::vector<std::pair<std::string, double>>;

struct BoundReport {
  std::string name;
  double value = 0.0;
  NamedValues terms;   ///< the combined sub-terms, in order
  Combine combine = Combine::kSum;
  double exponent = 1.0;  ///< for kLp
  double scale = 1.0;
  NamedValues extras;  ///< informational values (S, a, standard errors, ratios)
  NamedValues params;
  std::optional<AdmissibleSequence> witness;
  std::vector<std::string> diagnostics;
};

/// Recomputes value from terms, scale, and combine rule. Every producer sets
/// `value` through this function, so the recomputation is bit-exact.
double evaluate(const BoundReport& r);

/// Looks up a term or extra by name.
std::optional<double> find_value(const NamedValues& v, const std::string& key);

/// e_n(T) for n = 0..N with N = levels_to_resolve(|T|) (where e_N = 0).
std::vector<EntropyResult> entropy_profile(const SubsetView& t, EntropyMethod method = EntropyMethod::kAuto);

BoundReport dudley_bound(const SubsetView& t, double alpha, double p, EntropyMethod method = EntropyMethod::kAuto);
BoundReport sudakov_bound(const SubsetView& t, double alpha, EntropyMethod method = EntropyMethod::kAuto);
BoundReport local_dudley_bound(const SubsetView& t, double alpha, double p, double a,
                               EntropyMethod method = EntropyMethod::kAuto);

/// (1/a) sup_{x in T} f(x) + sum_n 2^{n/alpha} e_n(K_{a 2^{n/alpha}}) for a q = 1 problem.
BoundReport interpolation_bound(const InterpolationProblem& prob, double alpha, double a, int n_max = -1,
                                EntropyMethod method = EntropyMethod::kAuto);

/// M [sum_n (2^{n/alpha} e_n)^{q/(q-1)}]^{(q-1)/q} for q > 1, M sup_n 2^{n/alpha} e_n for q = 1.
BoundReport lattice_bound(const SubsetView& t, double alpha, double q, double m_const,
                          EntropyMethod method = EntropyMethod::kAuto);
/// eta^{-1/q} sup_n 2^{n/alpha} e_n.
BoundReport qconvex_bound(const SubsetView& t, double alpha, double q, double eta,
                          EntropyMethod method = EntropyMethod::kAuto);

/// Ceiling asserted for every "universal constant" comparison.
inline constexpr double kConstantCeiling = 64.0;
/// Small constant C of the constructive pipelines.
inline constexpr double kPipelineC = 0.125;

/// Witness from an explicit control matrix.
BoundReport plain_pipeline(const SubsetView& t, const ControlMatrix& ctrl, double alpha, double p, int n_max = -1);

/// Geometric principle: controls from the projection errors of `prob`
/// (target must equal T). q = 1 uses a = C/(L S); q > 1 scans a over a
/// geometric grid and keeps the best witness.
BoundReport geom_pipeline(const InterpolationProblem& prob, double alpha, double p, double q, double l_const,
                          EntropyMethod method = EntropyMethod::kAuto);

/// q-convex bodies: prob is the power variant with penalty ||y||_T; a = C/S
/// with S = eta^{-1/q} sup_n 2^{n/alpha} e_n(T); value is gamma_{alpha,q}.
BoundReport ucvx_pipeline(const InterpolationProblem& prob, double alpha, double eta,
                          EntropyMethod method = EntropyMethod::kAuto);

/// Geometric a-grid: 8 points per decade over [1e-3, 1e3].
std::vector<double> a_grid();

}  // namespace chainlab

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chainlab/metric.hpp"

namespace chainlab {

/// 2^{n/alpha}, the level weight used by every chaining functional.
inline double level_scale(int n, double alpha) { return std::exp2(n / alpha); }

using Cell = std::vector<PointIndex>;
using Partition = std::vector<Cell>;

/// Increasing sequence of partitions of a target set. Level 0 is {T}; the
/// last stored level is frozen for all higher n.
struct AdmissibleSequence {
  std::vector<PointIndex> target;  ///< sorted
  std::vector<Partition> levels;

  int n_max() const { return static_cast<int>(levels.size()) - 1; }
};

struct AdmissibilityAudit {
  bool ok = true;
  std::string problem;  ///< first failure found, empty when ok
};

/// Checks level 0 = {T}, disjoint covering cells, nesting, and |A_n| <= 2^{2^n} - 1.
AdmissibilityAudit audit_admissible(const AdmissibleSequence& seq);

/// Sorts cells and levels into canonical order (cells sorted, ordered by first member).
void canonicalize(AdmissibleSequence& seq);

/// Repeats the last level until the cardinality cap admits |T| cells, then
/// appends the all-singleton level. No-op when the last level is already
/// all singletons.
void continue_to_singletons(AdmissibleSequence& seq);

/// [sup_x sum_n (2^{n/alpha} diam(A_n(x)))^p]^{1/p} over the stored levels.
double value(const FiniteMetricSpace& space, const AdmissibleSequence& seq, double alpha, double p);

/// Per-point diameters diam(A_n(x)), indexed [n][position of x in target].
std::vector<std::vector<double>> cell_diameters(const FiniteMetricSpace& space, const AdmissibleSequence& seq);

/// Controls s_n(x) and contraction factor a. s(n, x) is indexed by level and
/// global point index.
struct ControlMatrix {
  Eigen::MatrixXd s;
  double a = 0.0;
};

struct BuildDiagnostic {
  int level = 0;
  int segment = 0;
  std::size_t cell = 0;   ///< index of the parent cell within level n-1
  std::size_t size = 0;   ///< points in the segment
  std::uint64_t budget = 0;
  double max_diam = 0.0;  ///< required piece diameter
};

struct RecursionViolation {
  int level = 0;
  PointIndex point = 0;
  double lhs = 0.0, rhs = 0.0;
};

struct BuildResult {
  AdmissibleSequence seq;
  std::vector<BuildDiagnostic> diagnostics;  ///< segments that could not be split within budget
  std::vector<RecursionViolation> violations;
  AdmissibilityAudit audit;
  int n_max = 0;  ///< construction levels (before the index shift)
};

/// Smallest n with 2^{2^n} > |T|.
int default_n_max(std::size_t target_size);

/// Contraction-principle partition builder.
///
/// Level n splits each cell of level n-1 into n segments by the size of
/// s_n(x) relative to diam(T), then splits each segment into fewer than
/// 2^{2^n} pieces of diameter at most
///   2a diam(B_{n-1}) + 2^{1+2/alpha} min_seg s_n + 2^{1-2(n-1)/alpha} diam(T).
/// The output is shifted (A_0 = A_1 = {T}, A_{n+2} = B_n), continued to
/// singletons, and audited for admissibility and the per-cell recursion.
/// n_max < 0 selects default_n_max(|T|).
BuildResult contraction_build(const FiniteMetricSpace& space, const SubsetView& t, const ControlMatrix& ctrl,
                              double alpha, int n_max = -1);

/// Checks diam(A_n(x)) <= 2a diam(A_{n-1}(x)) + 2^{1+2/alpha} s_{n-2}(x) + 2^{1-2(n-3)/alpha} diam(T)
/// for 3 <= n <= n_max + 2, with s clipped to diam(T) as in the builder.
std::vector<RecursionViolation> check_recursion(const FiniteMetricSpace& space, const AdmissibleSequence& seq,
                                                const ControlMatrix& ctrl, double alpha, int n_max);

/// The trivial controls s_n(x) = diam(A_n(x)) from an admissible sequence, a = 0.
ControlMatrix controls_from_sequence(const FiniteMetricSpace& space, const AdmissibleSequence& seq, int n_max);

struct GammaResult {
  double value = 0.0;
  AdmissibleSequence witness;
};

inline constexpr std::size_t kGammaExactLimit = 6;

/// Exact infimum of `value` over admissible sequences whose levels above
/// n_max follow the singleton continuation. |T| <= 6, n_max <= 2.
GammaResult gamma_exact(const FiniteMetricSpace& space, const SubsetView& t, double alpha, double p, int n_max = 2);

/// Nets T_n, one per level; |T_n| <= 2^{2^n} - 1. The last net is frozen
/// for all higher n.
using NetSequence = std::vector<std::vector<PointIndex>>;

/// [sup_x sum_n (2^{n/alpha} d(x, T_n))^p]^{1/p}.
double net_value(const FiniteMetricSpace& space, const SubsetView& t, const NetSequence& nets, double alpha,
                 double p);

/// Lowest-index point of every cell, level by level.
NetSequence partition_to_nets(const AdmissibleSequence& seq);

/// Feeds s_n(x) = d(x, T_n) with a = 0 into contraction_build. The nets are
/// first extended by repetition and closed with T itself so every level of
/// the builder has a control.
BuildResult nets_to_partition(const FiniteMetricSpace& space, const SubsetView& t, const NetSequence& nets,
                              double alpha, int n_max = -1);

}  // namespace chainlab

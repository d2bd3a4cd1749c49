#pragma once

#include <cstdint>
#include <vector>

#include "chainlab/metric.hpp"
#include "chainlab/parallel.hpp"

namespace chainlab {

enum class EntropyMethod {
  kExact,        ///< brute force over all nets drawn from the ground set (|ground| <= 20)
  kGreedy,       ///< farthest-first traversal, at most twice the exact value
  kAuto,         ///< kExact when |ground| <= 20, otherwise kGreedy
  kExactSearch,  ///< branch-and-bound k-center over candidate radii, any ground size
};

const char* to_string(EntropyMethod m);

inline constexpr std::size_t kExactGroundLimit = 20;
inline constexpr int kMaxEntropyLevel = 5;

/// Largest admissible net size at level n: 2^{2^n} - 1, saturating at
/// UINT64_MAX for n >= 6.
std::uint64_t net_cap(int n);

/// Smallest n with net_cap(n) >= count; below it a net cannot hold every point.
int levels_to_resolve(std::size_t count);

struct EntropyResult {
  int n = 0;
  double value = 0.0;
  std::vector<PointIndex> net;  ///< |net| <= net_cap(n); drawn from the ground set
  EntropyMethod method = EntropyMethod::kExact;
  /// False when kExactSearch ran out of its node budget; `value` is then
  /// the best radius found (an upper bound).
  bool exact = true;
};

/// e_n(A) with nets drawn from `ground` (the net need not lie inside A).
EntropyResult entropy_number(const SubsetView& a, int n, EntropyMethod method, const SubsetView& ground,
                             Execution exec = Execution::kParallel);

/// Same, with the whole space as ground.
EntropyResult entropy_number(const SubsetView& a, int n, EntropyMethod method = EntropyMethod::kAuto);

/// Serial reference for the exact kernel; matches the parallel result bit for bit.
EntropyResult exact_entropy_serial(const SubsetView& a, int n, const SubsetView& ground);

struct PackingResult {
  std::vector<PointIndex> points;
  std::uint64_t target = 0;  ///< 2^{2^n}
  bool reaches_target = false;
};

/// Maximal delta-separated subset of A built by a single in-order scan:
/// a point joins when it is farther than delta from every chosen point.
PackingResult greedy_packing(const SubsetView& a, int n, double delta);

/// Local entropy number sup{ r : e_n(T ∩ B(x, r/a)) > r }.
///
/// r -> e_n(T ∩ B(x, r/a)) is a step function with breakpoints at
/// a·d(x,y), so the supremum is evaluated exactly piece by piece.
double local_entropy(const SubsetView& t, int n, double a, PointIndex x, EntropyMethod method = EntropyMethod::kAuto);

struct ProperNet {
  std::vector<PointIndex> net;  ///< subset of T, |net| <= net_cap(n)
  double radius = 0.0;          ///< max over T of d(x, net)
  double ambient_value = 0.0;   ///< e_n(T) over the whole ground
  double guarantee = 4.0;       ///< radius <= guarantee * exact e_n(T)
};

/// A net inside T obtained by snapping an ambient net onto T.
ProperNet proper_net(const SubsetView& t, int n, EntropyMethod method = EntropyMethod::kAuto);

}  // namespace chainlab

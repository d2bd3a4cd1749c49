#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "chainlab/metric.hpp"

namespace chainlab {

struct PieceSplit {
  std::vector<std::vector<PointIndex>> pieces;  ///< sorted; ordered by first member
  bool within_bound = true;  ///< every piece has diameter <= max_diam
  bool minimal = false;      ///< piece count proven minimal by exhaustive search
};

/// Splits `points` into at most `max_pieces` pieces of diameter <= max_diam.
///
/// Two points conflict when their distance exceeds max_diam; a valid split
/// is a coloring of that conflict graph. DSATUR gives a first coloring, then
/// backtracking search (bounded node budget) tries to remove colors. When no
/// coloring fits the budget, farthest-first k-center with max_pieces centers
/// is returned instead and `within_bound` is false.
PieceSplit split_into_pieces(const FiniteMetricSpace& space, std::span<const PointIndex> points, double max_diam,
                             std::uint64_t max_pieces);

}  // namespace chainlab

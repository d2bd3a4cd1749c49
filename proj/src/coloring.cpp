#include "chainlab/coloring.hpp"

#include <algorithm>
#include <limits>

namespace chainlab {

namespace {

constexpr long long kNodeBudget = 200'000;

struct ConflictGraph {
  std::size_t n = 0;
  std::vector<std::vector<char>> adj;
  std::vector<int> degree;

  ConflictGraph(const FiniteMetricSpace& space, std::span<const PointIndex> pts, double max_diam)
      : n(pts.size()), adj(n, std::vector<char>(n, 0)), degree(n, 0) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (space(pts[i], pts[j]) > max_diam) {
          adj[i][j] = adj[j][i] = 1;
          ++degree[i];
          ++degree[j];
        }
  }
};

/// Highest saturation, then highest degree, then lowest index.
std::size_t pick_dsatur(const ConflictGraph& g, const std::vector<int>& color, const std::vector<int>& sat) {
  std::size_t best = g.n;
  for (std::size_t v = 0; v < g.n; ++v) {
    if (color[v] >= 0) continue;
    if (best == g.n || sat[v] > sat[best] || (sat[v] == sat[best] && g.degree[v] > g.degree[best])) best = v;
  }
  return best;
}

std::vector<int> dsatur(const ConflictGraph& g) {
  std::vector<int> color(g.n, -1), sat(g.n, 0);
  std::vector<std::vector<char>> seen(g.n, std::vector<char>(g.n + 1, 0));
  for (std::size_t step = 0; step < g.n; ++step) {
    const std::size_t v = pick_dsatur(g, color, sat);
    int c = 0;
    while (seen[v][static_cast<std::size_t>(c)]) ++c;
    color[v] = c;
    for (std::size_t u = 0; u < g.n; ++u)
      if (g.adj[v][u] && !seen[u][static_cast<std::size_t>(c)]) {
        seen[u][static_cast<std::size_t>(c)] = 1;
        ++sat[u];
      }
  }
  return color;
}

/// Backtracking k-coloring: 1 found, 0 impossible, -1 budget exhausted.
class ColorSearch {
 public:
  explicit ColorSearch(const ConflictGraph& g) : g_(g) {}

  int run(int k, std::vector<int>& out) {
    k_ = k;
    nodes_ = 0;
    color_.assign(g_.n, -1);
    const int res = recurse(0);
    if (res == 1) out = color_;
    return res;
  }

 private:
  int recurse(std::size_t colored) {
    if (colored == g_.n) return 1;
    if (++nodes_ > kNodeBudget) return -1;
    // most constrained uncolored vertex
    std::size_t v = g_.n;
    int best_sat = -1;
    for (std::size_t u = 0; u < g_.n; ++u) {
      if (color_[u] >= 0) continue;
      const int s = saturation(u);
      if (s > best_sat || (s == best_sat && g_.degree[u] > g_.degree[v])) {
        best_sat = s;
        v = u;
      }
    }
    // symmetry breaking: never open more than one new color
    int used = 0;
    for (int c : color_) used = std::max(used, c + 1);
    const int limit = std::min(k_, used + 1);
    for (int c = 0; c < limit; ++c) {
      if (conflicts(v, c)) continue;
      color_[v] = c;
      const int res = recurse(colored + 1);
      if (res != 0) return res;
      color_[v] = -1;
    }
    return 0;
  }

  bool conflicts(std::size_t v, int c) const {
    for (std::size_t u = 0; u < g_.n; ++u)
      if (g_.adj[v][u] && color_[u] == c) return true;
    return false;
  }

  int saturation(std::size_t v) const {
    std::vector<char> seen(g_.n, 0);
    int s = 0;
    for (std::size_t u = 0; u < g_.n; ++u)
      if (g_.adj[v][u] && color_[u] >= 0 && !seen[static_cast<std::size_t>(color_[u])]) {
        seen[static_cast<std::size_t>(color_[u])] = 1;
        ++s;
      }
    return s;
  }

  const ConflictGraph& g_;
  int k_ = 0;
  long long nodes_ = 0;
  std::vector<int> color_;
};

std::vector<std::vector<PointIndex>> group(std::span<const PointIndex> pts, const std::vector<int>& color) {
  const int count = color.empty() ? 0 : *std::max_element(color.begin(), color.end()) + 1;
  std::vector<std::vector<PointIndex>> pieces(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < pts.size(); ++i) pieces[static_cast<std::size_t>(color[i])].push_back(pts[i]);
  std::erase_if(pieces, [](const auto& p) { return p.empty(); });
  for (auto& p : pieces) std::sort(p.begin(), p.end());
  std::sort(pieces.begin(), pieces.end());
  return pieces;
}

int color_count(const std::vector<int>& color) {
  return color.empty() ? 0 : *std::max_element(color.begin(), color.end()) + 1;
}

std::vector<std::vector<PointIndex>> k_center_pieces(const FiniteMetricSpace& space, std::span<const PointIndex> pts,
                                                     std::size_t k) {
  std::vector<std::size_t> centers;
  std::vector<double> gap(pts.size(), std::numeric_limits<double>::infinity());
  std::size_t next = 0;
  for (std::size_t c = 0; c < k && c < pts.size(); ++c) {
    centers.push_back(next);
    double far = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      gap[i] = std::min(gap[i], space(pts[i], pts[centers.back()]));
      if (gap[i] > far) {
        far = gap[i];
        next = i;
      }
    }
  }
  std::vector<int> color(pts.size(), 0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::size_t arg = 0;
    for (std::size_t c = 1; c < centers.size(); ++c)
      if (space(pts[i], pts[centers[c]]) < space(pts[i], pts[centers[arg]])) arg = c;
    color[i] = static_cast<int>(arg);
  }
  return group(pts, color);
}

}  // namespace

PieceSplit split_into_pieces(const FiniteMetricSpace& space, std::span<const PointIndex> points, double max_diam,
                             std::uint64_t max_pieces) {
  PieceSplit out;
  if (points.empty()) {
    out.minimal = true;
    return out;
  }
  if (max_pieces == 0) throw InputError("piece budget must be positive");
  const ConflictGraph g(space, points, max_diam);
  std::vector<int> best = dsatur(g);
  ColorSearch search(g);
  bool proven = false;
  for (int k = color_count(best) - 1; k >= 1; --k) {
    std::vector<int> trial;
    const int res = search.run(k, trial);
    if (res == 1) {
      best = std::move(trial);
      continue;
    }
    proven = res == 0;
    break;
  }
  if (color_count(best) == 1) proven = true;
  if (static_cast<std::uint64_t>(color_count(best)) <= max_pieces) {
    out.pieces = group(points, best);
    out.minimal = proven;
    return out;
  }
  out.pieces = k_center_pieces(space, points, static_cast<std::size_t>(max_pieces));
  out.within_bound = false;
  return out;
}

}  // namespace chainlab

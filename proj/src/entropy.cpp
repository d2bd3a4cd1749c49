#include "chainlab/entropy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include <omp.h>

namespace chainlab {

const char* to_string(EntropyMethod m) {
  switch (m) {
    case EntropyMethod::kExact: return "exact";
    case EntropyMethod::kGreedy: return "greedy";
    case EntropyMethod::kAuto: return "auto";
    case EntropyMethod::kExactSearch: return "exact_search";
  }
  return "?";
}

std::uint64_t net_cap(int n) {
  if (n < 0) return 0;
  if (n >= 6) return std::numeric_limits<std::uint64_t>::max();
  return (std::uint64_t{1} << (std::uint64_t{1} << n)) - 1;
}

int levels_to_resolve(std::size_t count) {
  int n = 0;
  while (net_cap(n) < count) ++n;
  return n;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_level(int n) {
  if (n < 0 || n > kMaxEntropyLevel)
    throw InputError("entropy level must lie in [0, " + std::to_string(kMaxEntropyLevel) + "]");
}

std::size_t capped_net_size(int n, std::size_t available) {
  return static_cast<std::size_t>(std::min<std::uint64_t>(net_cap(n), available));
}

/// Dense |A| x |ground| distance table for the brute-force kernels.
struct CoverTable {
  std::vector<double> d;  // row-major, a-major
  std::size_t rows = 0, cols = 0;

  CoverTable(const SubsetView& a, const SubsetView& ground) : rows(a.size()), cols(ground.size()) {
    d.resize(rows * cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) d[i * cols + j] = a.space()(a[i], ground[j]);
  }

  /// Covering radius of the mask, abandoning once it reaches `cutoff`.
  double radius(std::uint32_t mask, double cutoff) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
      const double* row = d.data() + i * cols;
      double best = kInf;
      for (std::uint32_t m = mask; m != 0; m &= m - 1) best = std::min(best, row[std::countr_zero(m)]);
      worst = std::max(worst, best);
      if (worst >= cutoff) return worst;
    }
    return worst;
  }
};

struct MaskChoice {
  double value = kInf;
  std::uint32_t mask = 0;
};

bool better(const MaskChoice& a, const MaskChoice& b) {
  return a.value < b.value || (a.value == b.value && a.mask < b.mask);
}

EntropyResult finish_mask(int n, const MaskChoice& c, const SubsetView& ground) {
  EntropyResult r;
  r.n = n;
  r.value = c.value;
  r.method = EntropyMethod::kExact;
  for (std::uint32_t m = c.mask; m != 0; m &= m - 1) r.net.push_back(ground[std::countr_zero(m)]);
  return r;
}

void check_exact_inputs(const SubsetView& ground) {
  if (ground.empty()) throw InputError("ground set is empty");
  if (ground.size() > kExactGroundLimit)
    throw InputError("exact entropy requires |ground| <= " + std::to_string(kExactGroundLimit));
}

EntropyResult trivial_result(int n, EntropyMethod m) {
  EntropyResult r;
  r.n = n;
  r.method = m;
  return r;
}

std::uint64_t binomial(unsigned n, std::size_t k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Next larger mask with the same popcount (Gosper's hack).
std::uint64_t next_mask(std::uint64_t mask) {
  if (mask == 0) return 0;
  const std::uint64_t c = mask & (~mask + 1);
  const std::uint64_t r = mask + c;
  return (((r ^ mask) >> 2) / c) | r;
}

/// The rank-th popcount-k mask below 2^g in increasing numeric order.
std::uint64_t unrank_mask(std::uint64_t rank, std::size_t k, unsigned g) {
  std::uint64_t mask = 0;
  for (unsigned p = g; k > 0 && p-- > 0;) {
    const std::uint64_t below = binomial(p, k);
    if (rank >= below) {
      mask |= std::uint64_t{1} << p;
      rank -= below;
      --k;
    }
  }
  return mask;
}

EntropyResult exact_entropy_parallel(const SubsetView& a, int n, const SubsetView& ground) {
  check_exact_inputs(ground);
  if (a.empty()) return trivial_result(n, EntropyMethod::kExact);
  const std::size_t k = capped_net_size(n, ground.size());
  const CoverTable table(a, ground);
  const auto g = static_cast<unsigned>(ground.size());
  const std::uint64_t total = binomial(g, k);

  // Chunks cover consecutive ranks of the increasing popcount-k masks, with
  // chunk-local pruning, so the merged (value, mask) minimum equals the
  // serial Gosper scan exactly.
  constexpr std::uint64_t kChunk = 1 << 10;
  const std::uint64_t chunks = (total + kChunk - 1) / kChunk;
  std::vector<MaskChoice> partial(chunks);
#pragma omp parallel for schedule(dynamic)
  for (long long c = 0; c < static_cast<long long>(chunks); ++c) {
    MaskChoice local;
    const std::uint64_t lo = static_cast<std::uint64_t>(c) * kChunk;
    const std::uint64_t count = std::min(total, lo + kChunk) - lo;
    std::uint64_t mask = unrank_mask(lo, k, g);
    for (std::uint64_t step = 0; step < count; ++step) {
      const double v = table.radius(static_cast<std::uint32_t>(mask), local.value);
      if (v < local.value) local = {v, static_cast<std::uint32_t>(mask)};
      mask = next_mask(mask);
    }
    partial[static_cast<std::size_t>(c)] = local;
  }
  MaskChoice best;
  for (const auto& p : partial)
    if (better(p, best)) best = p;
  return finish_mask(n, best, ground);
}

EntropyResult greedy_entropy(const SubsetView& a, int n) {
  EntropyResult r = trivial_result(n, EntropyMethod::kGreedy);
  if (a.empty()) return r;
  const auto& space = a.space();
  const std::size_t k = capped_net_size(n, a.size());
  std::vector<double> gap(a.size(), kInf);
  std::size_t next = 0;  // lowest index first
  for (std::size_t c = 0; c < k; ++c) {
    const PointIndex center = a[next];
    r.net.push_back(center);
    double far = -1.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      gap[i] = std::min(gap[i], space(a[i], center));
      if (gap[i] > far) {
        far = gap[i];
        next = i;
      }
    }
  }
  r.value = *std::max_element(gap.begin(), gap.end());
  std::sort(r.net.begin(), r.net.end());
  return r;
}

/// Exact k-center decision by branch and bound over candidate centers.
class CoverSearch {
 public:
  CoverSearch(const SubsetView& a, const SubsetView& ground, long long node_budget)
      : a_(a), ground_(ground), budget_(node_budget) {}

  /// Attempts to cover A by at most k balls of radius r centered in ground.
  /// Returns 1 on success, 0 if impossible, -1 if the node budget ran out.
  int feasible(double r, std::size_t k, std::vector<std::size_t>& centers) {
    const std::size_t na = a_.size(), ng = ground_.size();
    // incidence bitsets in both directions
    const std::size_t pw = (na + 63) / 64, cw = (ng + 63) / 64;
    std::vector<std::vector<std::uint64_t>> ball(ng, std::vector<std::uint64_t>(pw, 0));
    std::vector<std::vector<std::uint64_t>> opts(na, std::vector<std::uint64_t>(cw, 0));
    for (std::size_t j = 0; j < ng; ++j)
      for (std::size_t i = 0; i < na; ++i)
        if (a_.space()(a_[i], ground_[j]) <= r) {
          ball[j][i / 64] |= std::uint64_t{1} << (i % 64);
          opts[i][j / 64] |= std::uint64_t{1} << (j % 64);
        }
    for (std::size_t i = 0; i < na; ++i)
      if (std::all_of(opts[i].begin(), opts[i].end(), [](std::uint64_t w) { return w == 0; })) return 0;

    // Set-cover reductions, repeated until stable: a center whose ball (on
    // the remaining points) lies inside another's is never needed, and a
    // point whose options contain another point's options is covered for free.
    std::vector<char> live_c(ng, 1), live_p(na, 1);
    // keep_big: drop x when sets[x] lies inside another live set (centers);
    // otherwise drop x when another live set lies inside sets[x] (points).
    // Equal sets keep the lower index.
    auto prune = [](const std::vector<std::vector<std::uint64_t>>& sets, std::vector<char>& live, bool keep_big) {
      bool changed = false;
      const std::size_t n = sets.size();
      std::vector<std::size_t> size(n, 0);
      for (std::size_t x = 0; x < n; ++x)
        for (auto w : sets[x]) size[x] += static_cast<std::size_t>(std::popcount(w));
      for (std::size_t x = 0; x < n; ++x) {
        if (!live[x]) continue;
        for (std::size_t y = 0; y < n; ++y) {
          if (y == x || !live[y]) continue;
          const auto& small = keep_big ? sets[x] : sets[y];
          const auto& big = keep_big ? sets[y] : sets[x];
          const std::size_t ss = keep_big ? size[x] : size[y], bs = keep_big ? size[y] : size[x];
          if (ss > bs || (ss == bs && y > x)) continue;
          bool inside = true;
          for (std::size_t w = 0; w < small.size() && inside; ++w) inside = (small[w] & ~big[w]) == 0;
          if (inside) {
            live[x] = 0;
            changed = true;
            break;
          }
        }
      }
      return changed;
    };
    auto restrict_to = [](std::vector<std::vector<std::uint64_t>>& sets, const std::vector<char>& live) {
      for (auto& s : sets)
        for (std::size_t b = 0; b < live.size(); ++b)
          if (!live[b]) s[b / 64] &= ~(std::uint64_t{1} << (b % 64));
    };
    for (bool changed = true; changed;) {
      changed = prune(ball, live_c, true);
      restrict_to(opts, live_c);
      changed = prune(opts, live_p, false) || changed;
      restrict_to(ball, live_p);
    }

    covers_.assign(ng, {});
    covered_by_.assign(na, {});
    for (std::size_t j = 0; j < ng; ++j)
      if (live_c[j])
        for (std::size_t i = 0; i < na; ++i)
          if (live_p[i] && (ball[j][i / 64] >> (i % 64) & 1)) {
            covers_[j].push_back(i);
            covered_by_[i].push_back(j);
          }
    count_.assign(na, 0);
    for (std::size_t i = 0; i < na; ++i)
      if (!live_p[i]) count_[i] = 1;  // covered by whichever center covers its dominating point
    chosen_.clear();
    nodes_ = 0;
    const int res = recurse(k);
    if (res == 1) centers = chosen_;
    return res;
  }

 private:
  int recurse(std::size_t remaining) {
    if (++nodes_ > budget_) return -1;
    // pick the uncovered point with the fewest covering centers
    std::size_t pivot = a_.size(), fewest = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i < a_.size(); ++i)
      if (count_[i] == 0 && covered_by_[i].size() < fewest) {
        fewest = covered_by_[i].size();
        pivot = i;
      }
    if (pivot == a_.size()) return 1;
    if (remaining == 0) return 0;
    if (lower_bound() > remaining) return 0;
    std::vector<std::size_t> options = covered_by_[pivot];
    std::stable_sort(options.begin(), options.end(), [&](std::size_t x, std::size_t y) {
      return gain(x) > gain(y);
    });
    bool budget_hit = false;
    for (std::size_t j : options) {
      apply(j, +1);
      chosen_.push_back(j);
      const int res = recurse(remaining - 1);
      if (res == 1) return 1;
      chosen_.pop_back();
      apply(j, -1);
      if (res == -1) {
        budget_hit = true;
        break;
      }
    }
    return budget_hit ? -1 : 0;
  }

  std::size_t gain(std::size_t j) const {
    std::size_t g = 0;
    for (std::size_t i : covers_[j]) g += count_[i] == 0;
    return g;
  }

  void apply(std::size_t j, int delta) {
    for (std::size_t i : covers_[j]) count_[i] += delta;
  }

  /// Uncovered points no two of which share a candidate center each need
  /// their own ball.
  std::size_t lower_bound() {
    mark_.assign(ground_.size(), 0);
    order_.clear();
    for (std::size_t i = 0; i < a_.size(); ++i)
      if (count_[i] == 0) order_.push_back(i);
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t x, std::size_t y) {
      return covered_by_[x].size() < covered_by_[y].size();
    });
    std::size_t lb = 0;
    for (std::size_t i : order_) {
      bool free = true;
      for (std::size_t j : covered_by_[i])
        if (mark_[j]) {
          free = false;
          break;
        }
      if (!free) continue;
      ++lb;
      for (std::size_t j : covered_by_[i]) mark_[j] = 1;
    }
    return lb;
  }

  const SubsetView& a_;
  const SubsetView& ground_;
  long long budget_;
  long long nodes_ = 0;
  std::vector<std::vector<std::size_t>> covers_, covered_by_;
  std::vector<int> count_;
  std::vector<char> mark_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> chosen_;
};

EntropyResult exact_search_entropy(const SubsetView& a, int n, const SubsetView& ground) {
  EntropyResult r = trivial_result(n, EntropyMethod::kExactSearch);
  if (a.empty()) return r;
  if (ground.empty()) throw InputError("ground set is empty");
  const std::size_t k = capped_net_size(n, ground.size());

  std::vector<double> radii;
  radii.reserve(a.size() * ground.size());
  for (PointIndex x : a.indices())
    for (PointIndex g : ground.indices()) radii.push_back(a.space()(x, g));
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

  // Farthest-first traversal brackets the optimum: k+1 of its points are
  // pairwise at least R apart, so no radius below R/2 is feasible, and when
  // A lies inside the ground its net is a feasible choice at R.
  const EntropyResult greedy = greedy_entropy(a, n);
  std::size_t lo = static_cast<std::size_t>(
      std::lower_bound(radii.begin(), radii.end(), 0.5 * greedy.value) - radii.begin());
  std::size_t hi = radii.size() - 1;
  std::vector<std::size_t> centers, best_centers;
  bool have_best = false;
  if (std::all_of(a.indices().begin(), a.indices().end(), [&](PointIndex x) { return ground.contains(x); }) &&
      greedy.net.size() <= k) {
    hi = static_cast<std::size_t>(std::lower_bound(radii.begin(), radii.end(), greedy.value) - radii.begin());
    const auto gi = ground.indices();
    for (PointIndex x : greedy.net)
      best_centers.push_back(static_cast<std::size_t>(std::lower_bound(gi.begin(), gi.end(), x) - gi.begin()));
    have_best = true;
  }
  CoverSearch search(a, ground, 2'000'000);
  if (!have_best) {
    // The largest radius is always feasible with a single center.
    if (search.feasible(radii[hi], k, best_centers) != 1) best_centers.assign(1, 0);
  }
  lo = std::min(lo, hi);
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const int ok = search.feasible(radii[mid], k, centers);
    if (ok == 1) {
      hi = mid;
      best_centers = centers;
    } else {
      if (ok == -1) r.exact = false;
      lo = mid + 1;
    }
  }
  for (std::size_t j : best_centers) r.net.push_back(ground[j]);
  std::sort(r.net.begin(), r.net.end());
  r.net.erase(std::unique(r.net.begin(), r.net.end()), r.net.end());
  double worst = 0.0;
  for (PointIndex x : a.indices()) worst = std::max(worst, dist_to_set(a.space(), x, r.net));
  r.value = worst;
  return r;
}

}  // namespace

EntropyResult exact_entropy_serial(const SubsetView& a, int n, const SubsetView& ground) {
  check_level(n);
  check_exact_inputs(ground);
  if (a.empty()) return trivial_result(n, EntropyMethod::kExact);
  const std::size_t k = capped_net_size(n, ground.size());
  const CoverTable table(a, ground);
  const auto g = static_cast<unsigned>(ground.size());
  MaskChoice best;
  // Gosper's hack: every mask with popcount k in increasing order.
  std::uint64_t mask = (std::uint64_t{1} << k) - 1;
  const std::uint64_t limit = std::uint64_t{1} << g;
  while (mask < limit) {
    const double v = table.radius(static_cast<std::uint32_t>(mask), best.value);
    if (v < best.value) best = {v, static_cast<std::uint32_t>(mask)};
    if (k == 0) break;
    mask = next_mask(mask);
  }
  return finish_mask(n, best, ground);
}

EntropyResult entropy_number(const SubsetView& a, int n, EntropyMethod method, const SubsetView& ground,
                             Execution exec) {
  check_level(n);
  if (method == EntropyMethod::kAuto)
    method = ground.size() <= kExactGroundLimit ? EntropyMethod::kExact : EntropyMethod::kGreedy;
  switch (method) {
    case EntropyMethod::kExact:
      return exec == Execution::kSerial ? exact_entropy_serial(a, n, ground) : exact_entropy_parallel(a, n, ground);
    case EntropyMethod::kGreedy: return greedy_entropy(a, n);
    case EntropyMethod::kExactSearch: return exact_search_entropy(a, n, ground);
    case EntropyMethod::kAuto: break;
  }
  throw InputError("unknown entropy method");
}

EntropyResult entropy_number(const SubsetView& a, int n, EntropyMethod method) {
  return entropy_number(a, n, method, SubsetView::all(a.space()));
}

PackingResult greedy_packing(const SubsetView& a, int n, double delta) {
  if (!(delta > 0.0)) throw InputError("packing separation must be positive");
  check_level(n);
  PackingResult out;
  out.target = net_cap(n) + 1;
  for (PointIndex x : a.indices()) {
    bool separated = true;
    for (PointIndex y : out.points)
      if (!(a.space()(x, y) > delta)) {
        separated = false;
        break;
      }
    if (separated) out.points.push_back(x);
  }
  out.reaches_target = out.points.size() >= out.target;
  return out;
}

double local_entropy(const SubsetView& t, int n, double a, PointIndex x, EntropyMethod method) {
  if (!(a > 0.0)) throw InputError("local entropy scale a must be positive");
  check_level(n);
  if (t.empty()) return 0.0;
  const auto& space = t.space();
  std::vector<double> dists;
  for (PointIndex y : t.indices()) dists.push_back(space(x, y));
  std::sort(dists.begin(), dists.end());
  dists.erase(std::unique(dists.begin(), dists.end()), dists.end());
  if (dists.front() != 0.0) dists.insert(dists.begin(), 0.0);

  const SubsetView ground = SubsetView::all(space);
  double sup = 0.0;
  for (std::size_t piece = 0; piece < dists.size(); ++piece) {
    // r in [a·dists[piece], a·dists[piece+1]) sees the ball of radius dists[piece]
    const double lo = a * dists[piece];
    const double hi = piece + 1 < dists.size() ? a * dists[piece + 1] : kInf;
    std::vector<PointIndex> ball;
    for (PointIndex y : t.indices())
      if (space(x, y) <= dists[piece]) ball.push_back(y);
    const double e = entropy_number(SubsetView(space, std::move(ball)), n, method, ground).value;
    if (e > lo) sup = std::max(sup, std::min(e, hi));
  }
  return sup;
}

ProperNet proper_net(const SubsetView& t, int n, EntropyMethod method) {
  if (t.empty()) throw InputError("proper_net requires a nonempty set");
  const auto& space = t.space();
  const EntropyResult ambient = entropy_number(t, n, method);
  ProperNet out;
  out.ambient_value = ambient.value;
  out.guarantee = ambient.method == EntropyMethod::kGreedy ||
                          (method == EntropyMethod::kAuto && space.size() > kExactGroundLimit)
                      ? 8.0
                      : 4.0;
  // keep only centers that serve some point of T, then snap each to its nearest point of T
  std::vector<char> used(ambient.net.size(), 0);
  for (PointIndex x : t.indices()) {
    std::size_t arg = 0;
    for (std::size_t c = 1; c < ambient.net.size(); ++c)
      if (space(x, ambient.net[c]) < space(x, ambient.net[arg])) arg = c;
    used[arg] = 1;
  }
  for (std::size_t c = 0; c < ambient.net.size(); ++c) {
    if (!used[c]) continue;
    PointIndex nearest = t[0];
    for (PointIndex y : t.indices())
      if (space(ambient.net[c], y) < space(ambient.net[c], nearest)) nearest = y;
    out.net.push_back(nearest);
  }
  std::sort(out.net.begin(), out.net.end());
  out.net.erase(std::unique(out.net.begin(), out.net.end()), out.net.end());
  for (PointIndex x : t.indices()) out.radius = std::max(out.radius, dist_to_set(space, x, out.net));
  return out;
}

}  // namespace chainlab

#include "chainlab/partitions.hpp"

#include <algorithm>
#include <limits>

#include "chainlab/coloring.hpp"
#include "chainlab/entropy.hpp"
#include "chainlab/parallel.hpp"

namespace chainlab {

namespace {

std::vector<int> position_map(std::size_t space_size, const std::vector<PointIndex>& target) {
  std::vector<int> pos(space_size, -1);
  for (std::size_t i = 0; i < target.size(); ++i) pos[static_cast<std::size_t>(target[i])] = static_cast<int>(i);
  return pos;
}

std::string level_name(std::size_t n) { return "level " + std::to_string(n); }

/// Piece diameter allowed at builder level n; shared with the recursion audit
/// so both sides evaluate the same floating-point expression.
double piece_bound(double a, double parent_diam, double s, double alpha, int n, double diam_t) {
  return 2.0 * a * parent_diam + std::exp2(1.0 + 2.0 / alpha) * s + std::exp2(1.0 - 2.0 * (n - 1) / alpha) * diam_t;
}

double clipped_control(const ControlMatrix& ctrl, int n, PointIndex x, double diam_t) {
  return std::min(ctrl.s(n, x), diam_t);
}

/// Segment of s at level n: i-1 when 2^{-2i/alpha} D < s <= 2^{-2(i-1)/alpha} D
/// for some i < n, else n-1.
int segment_of(double s, int n, double alpha, double diam_t) {
  for (int i = 1; i < n; ++i)
    if (s > std::exp2(-2.0 * i / alpha) * diam_t) return i - 1;
  return n - 1;
}

void sort_partition(Partition& p) {
  for (auto& c : p) std::sort(c.begin(), c.end());
  std::sort(p.begin(), p.end());
}

/// All set partitions of `items` with at most `max_blocks` blocks, in
/// restricted-growth-string order.
std::vector<Partition> set_partitions(const std::vector<PointIndex>& items, std::uint64_t max_blocks) {
  std::vector<Partition> out;
  const std::size_t m = items.size();
  if (m == 0) {
    out.emplace_back();
    return out;
  }
  std::vector<int> rgs(m, 0);
  while (true) {
    const int blocks = *std::max_element(rgs.begin(), rgs.end()) + 1;
    if (static_cast<std::uint64_t>(blocks) <= max_blocks) {
      Partition p(static_cast<std::size_t>(blocks));
      for (std::size_t i = 0; i < m; ++i) p[static_cast<std::size_t>(rgs[i])].push_back(items[i]);
      out.push_back(std::move(p));
    }
    // next restricted growth string
    std::size_t i = m - 1;
    for (; i > 0; --i) {
      int prefix_max = 0;
      for (std::size_t j = 0; j < i; ++j) prefix_max = std::max(prefix_max, rgs[j]);
      if (rgs[i] <= prefix_max) {
        ++rgs[i];
        std::fill(rgs.begin() + static_cast<long>(i) + 1, rgs.end(), 0);
        break;
      }
    }
    if (i == 0) break;
  }
  return out;
}

/// Every refinement of `p` with at most `max_blocks` cells.
std::vector<Partition> refinements(const Partition& p, std::uint64_t max_blocks) {
  std::vector<Partition> acc{Partition{}};
  for (const Cell& cell : p) {
    const auto options = set_partitions(cell, max_blocks);
    std::vector<Partition> next;
    for (const auto& base : acc)
      for (const auto& opt : options) {
        if (base.size() + opt.size() > max_blocks) continue;
        Partition merged = base;
        merged.insert(merged.end(), opt.begin(), opt.end());
        next.push_back(std::move(merged));
      }
    acc = std::move(next);
  }
  for (auto& q : acc) sort_partition(q);
  return acc;
}

}  // namespace

AdmissibilityAudit audit_admissible(const AdmissibleSequence& seq) {
  AdmissibilityAudit out;
  auto fail = [&](std::string msg) {
    out.ok = false;
    out.problem = std::move(msg);
    return out;
  };
  if (seq.levels.empty()) return fail("no levels");
  if (seq.target.empty()) return fail("empty target");
  std::vector<PointIndex> sorted_target = seq.target;
  std::sort(sorted_target.begin(), sorted_target.end());
  if (seq.levels[0].size() != 1) return fail("level 0 must be the single cell T");
  const PointIndex top = sorted_target.back();
  std::vector<int> parent_of(static_cast<std::size_t>(top) + 1, -1);
  for (std::size_t n = 0; n < seq.levels.size(); ++n) {
    const Partition& level = seq.levels[n];
    if (static_cast<std::uint64_t>(level.size()) > net_cap(static_cast<int>(n)))
      return fail(level_name(n) + " has too many cells");
    std::vector<int> owner(static_cast<std::size_t>(top) + 1, -1);
    std::size_t covered = 0;
    for (std::size_t c = 0; c < level.size(); ++c) {
      if (level[c].empty()) return fail(level_name(n) + " has an empty cell");
      for (PointIndex x : level[c]) {
        if (!std::binary_search(sorted_target.begin(), sorted_target.end(), x))
          return fail(level_name(n) + " contains a point outside T");
        if (owner[static_cast<std::size_t>(x)] != -1) return fail(level_name(n) + " cells overlap");
        owner[static_cast<std::size_t>(x)] = static_cast<int>(c);
        ++covered;
      }
    }
    if (covered != sorted_target.size()) return fail(level_name(n) + " does not cover T");
    if (n > 0) {
      for (const Cell& cell : level) {
        const int p = parent_of[static_cast<std::size_t>(cell.front())];
        for (PointIndex x : cell)
          if (parent_of[static_cast<std::size_t>(x)] != p) return fail(level_name(n) + " is not nested in its parent");
      }
    }
    parent_of = std::move(owner);
  }
  return out;
}

void canonicalize(AdmissibleSequence& seq) {
  std::sort(seq.target.begin(), seq.target.end());
  for (auto& level : seq.levels) sort_partition(level);
}

void continue_to_singletons(AdmissibleSequence& seq) {
  if (seq.levels.empty()) seq.levels.push_back({seq.target});
  const std::size_t m = seq.target.size();
  if (seq.levels.back().size() == m) return;
  while (net_cap(static_cast<int>(seq.levels.size())) < m) seq.levels.push_back(seq.levels.back());
  Partition singles;
  for (PointIndex x : seq.target) singles.push_back({x});
  sort_partition(singles);
  seq.levels.push_back(std::move(singles));
}

std::vector<std::vector<double>> cell_diameters(const FiniteMetricSpace& space, const AdmissibleSequence& seq) {
  const auto pos = position_map(space.size(), seq.target);
  std::vector<std::vector<double>> out(seq.levels.size(), std::vector<double>(seq.target.size(), 0.0));
  for (std::size_t n = 0; n < seq.levels.size(); ++n)
    for (const Cell& cell : seq.levels[n]) {
      const double d = diam(space, cell);
      for (PointIndex x : cell) out[n][static_cast<std::size_t>(pos[static_cast<std::size_t>(x)])] = d;
    }
  return out;
}

double value(const FiniteMetricSpace& space, const AdmissibleSequence& seq, double alpha, double p) {
  if (!(alpha > 0.0)) throw InputError("alpha must be positive");
  if (!(p >= 1.0)) throw InputError("p must be >= 1");
  const auto diams = cell_diameters(space, seq);
  double sup = 0.0;
  for (std::size_t x = 0; x < seq.target.size(); ++x) {
    double sum = 0.0;
    for (std::size_t n = 0; n < diams.size(); ++n)
      sum += std::pow(level_scale(static_cast<int>(n), alpha) * diams[n][x], p);
    sup = std::max(sup, sum);
  }
  return std::pow(sup, 1.0 / p);
}

int default_n_max(std::size_t target_size) {
  int n = 0;
  while (net_cap(n) < target_size) ++n;
  return n;
}

BuildResult contraction_build(const FiniteMetricSpace& space, const SubsetView& t, const ControlMatrix& ctrl,
                              double alpha, int n_max) {
  if (t.empty()) throw InputError("target set is empty");
  if (!(alpha > 0.0)) throw InputError("alpha must be positive");
  if (!(ctrl.a >= 0.0) || !std::isfinite(ctrl.a)) throw InputError("control a must be finite and >= 0");
  if (n_max < 0) n_max = default_n_max(t.size());
  if (n_max > kMaxEntropyLevel + 1) throw InputError("n_max too large");
  if (ctrl.s.rows() < n_max + 1 || ctrl.s.cols() != static_cast<Eigen::Index>(space.size()))
    throw InputError("control matrix must have n_max+1 rows and one column per point");
  for (int n = 1; n <= n_max; ++n)
    for (PointIndex x : t.indices())
      if (!(ctrl.s(n, x) >= 0.0) || !std::isfinite(ctrl.s(n, x)))
        throw InputError("controls s_n(x) must be finite and nonnegative");

  const double diam_t = diam(t);
  const std::vector<PointIndex> target(t.indices().begin(), t.indices().end());
  BuildResult out;
  out.n_max = n_max;
  std::vector<Partition> b{{target}};
  for (int n = 1; n <= n_max; ++n) {
    const std::uint64_t budget = net_cap(n);
    Partition next;
    const Partition& prev = b.back();
    for (std::size_t ci = 0; ci < prev.size(); ++ci) {
      const Cell& cell = prev[ci];
      const double parent_diam = diam(space, cell);
      std::vector<Cell> segments(static_cast<std::size_t>(n));
      std::vector<double> seg_min(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
      for (PointIndex x : cell) {
        const double s = clipped_control(ctrl, n, x, diam_t);
        const auto j = static_cast<std::size_t>(segment_of(s, n, alpha, diam_t));
        segments[j].push_back(x);
        seg_min[j] = std::min(seg_min[j], s);
      }
      for (std::size_t j = 0; j < segments.size(); ++j) {
        if (segments[j].empty()) continue;
        const double bound = piece_bound(ctrl.a, parent_diam, seg_min[j], alpha, n, diam_t);
        PieceSplit split = split_into_pieces(space, segments[j], bound, budget);
        if (!split.within_bound)
          out.diagnostics.push_back({n, static_cast<int>(j) + 1, ci, segments[j].size(), budget, bound});
        for (auto& piece : split.pieces) next.push_back(std::move(piece));
      }
    }
    sort_partition(next);
    b.push_back(std::move(next));
  }

  out.seq.target = target;
  out.seq.levels = {{target}, {target}};
  for (auto& level : b) out.seq.levels.push_back(std::move(level));
  continue_to_singletons(out.seq);
  out.audit = audit_admissible(out.seq);
  out.violations = check_recursion(space, out.seq, ctrl, alpha, n_max);
  return out;
}

std::vector<RecursionViolation> check_recursion(const FiniteMetricSpace& space, const AdmissibleSequence& seq,
                                                const ControlMatrix& ctrl, double alpha, int n_max) {
  std::vector<RecursionViolation> out;
  if (seq.target.empty()) return out;
  const double diam_t = diam(space, seq.target);
  const auto diams = cell_diameters(space, seq);
  const int top = std::min(n_max + 2, seq.n_max());
  for (int level = 3; level <= top; ++level) {
    const int n = level - 2;
    for (std::size_t i = 0; i < seq.target.size(); ++i) {
      const PointIndex x = seq.target[i];
      const double lhs = diams[static_cast<std::size_t>(level)][i];
      const double rhs = piece_bound(ctrl.a, diams[static_cast<std::size_t>(level) - 1][i],
                                     clipped_control(ctrl, n, x, diam_t), alpha, n, diam_t);
      if (lhs > rhs) out.push_back({level, x, lhs, rhs});
    }
  }
  return out;
}

ControlMatrix controls_from_sequence(const FiniteMetricSpace& space, const AdmissibleSequence& seq, int n_max) {
  ControlMatrix ctrl;
  ctrl.a = 0.0;
  ctrl.s = Eigen::MatrixXd::Zero(n_max + 1, static_cast<Eigen::Index>(space.size()));
  const auto diams = cell_diameters(space, seq);
  for (int n = 0; n <= n_max; ++n) {
    const auto level = static_cast<std::size_t>(std::min(n, seq.n_max()));
    for (std::size_t i = 0; i < seq.target.size(); ++i) ctrl.s(n, seq.target[i]) = diams[level][i];
  }
  return ctrl;
}

GammaResult gamma_exact(const FiniteMetricSpace& space, const SubsetView& t, double alpha, double p, int n_max) {
  if (t.empty()) throw InputError("target set is empty");
  if (t.size() > kGammaExactLimit) throw InputError("gamma_exact requires |T| <= 6");
  if (n_max < 0 || n_max > 2) throw InputError("gamma_exact requires 0 <= n_max <= 2");
  const std::vector<PointIndex> target(t.indices().begin(), t.indices().end());

  auto evaluate = [&](std::vector<Partition> levels) {
    GammaResult r;
    r.witness.target = target;
    r.witness.levels = std::move(levels);
    continue_to_singletons(r.witness);
    r.value = value(space, r.witness, alpha, p);
    return r;
  };

  if (n_max == 0) return evaluate({{target}});
  const auto firsts = refinements({target}, net_cap(1));
  // fan out over level-1 choices; merge in enumeration order keeps the first minimum
  std::vector<GammaResult> best(firsts.size());
  for_each_index(firsts.size(), Execution::kParallel, [&](std::size_t i) {
    GammaResult local = evaluate({{target}, firsts[i]});
    if (n_max == 2)
      for (const auto& second : refinements(firsts[i], net_cap(2))) {
        GammaResult r = evaluate({{target}, firsts[i], second});
        if (r.value < local.value) local = std::move(r);
      }
    best[i] = std::move(local);
  });
  std::size_t arg = 0;
  for (std::size_t i = 1; i < best.size(); ++i)
    if (best[i].value < best[arg].value) arg = i;
  return best[arg];
}

double net_value(const FiniteMetricSpace& space, const SubsetView& t, const NetSequence& nets, double alpha,
                 double p) {
  if (!(alpha > 0.0)) throw InputError("alpha must be positive");
  if (!(p >= 1.0)) throw InputError("p must be >= 1");
  for (std::size_t n = 0; n < nets.size(); ++n) {
    if (nets[n].empty()) throw InputError("net at level " + std::to_string(n) + " is empty");
    if (static_cast<std::uint64_t>(nets[n].size()) > net_cap(static_cast<int>(n)))
      throw InputError("net at level " + std::to_string(n) + " exceeds 2^{2^n} - 1 points");
  }
  double sup = 0.0;
  for (PointIndex x : t.indices()) {
    double sum = 0.0;
    for (std::size_t n = 0; n < nets.size(); ++n)
      sum += std::pow(level_scale(static_cast<int>(n), alpha) * dist_to_set(space, x, nets[n]), p);
    sup = std::max(sup, sum);
  }
  return std::pow(sup, 1.0 / p);
}

NetSequence partition_to_nets(const AdmissibleSequence& seq) {
  NetSequence nets;
  for (const Partition& level : seq.levels) {
    std::vector<PointIndex> net;
    for (const Cell& cell : level) net.push_back(*std::min_element(cell.begin(), cell.end()));
    std::sort(net.begin(), net.end());
    nets.push_back(std::move(net));
  }
  return nets;
}

BuildResult nets_to_partition(const FiniteMetricSpace& space, const SubsetView& t, const NetSequence& nets,
                              double alpha, int n_max) {
  if (t.empty()) throw InputError("target set is empty");
  if (nets.empty()) throw InputError("net sequence is empty");
  for (std::size_t n = 0; n < nets.size(); ++n) {
    if (nets[n].empty()) throw InputError("net at level " + std::to_string(n) + " is empty");
    if (static_cast<std::uint64_t>(nets[n].size()) > net_cap(static_cast<int>(n)))
      throw InputError("net at level " + std::to_string(n) + " exceeds 2^{2^n} - 1 points");
    for (PointIndex y : nets[n])
      if (y < 0 || static_cast<std::size_t>(y) >= space.size()) throw InputError("net point out of range");
  }
  if (n_max < 0) n_max = default_n_max(t.size());
  const std::vector<PointIndex> whole(t.indices().begin(), t.indices().end());
  ControlMatrix ctrl;
  ctrl.a = 0.0;
  ctrl.s = Eigen::MatrixXd::Zero(n_max + 1, static_cast<Eigen::Index>(space.size()));
  std::vector<PointIndex> current = nets.front();
  for (int n = 0; n <= n_max; ++n) {
    if (static_cast<std::size_t>(n) < nets.size())
      current = nets[static_cast<std::size_t>(n)];
    else if (net_cap(n) >= whole.size())
      current = whole;
    for (PointIndex x : t.indices()) ctrl.s(n, x) = dist_to_set(space, x, current);
  }
  return contraction_build(space, t, ctrl, alpha, n_max);
}

}  // namespace chainlab

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "chainlab/coloring.hpp"
#include "chainlab/partitions.hpp"
#include "support.hpp"

using namespace chainlab;

namespace {

// Every set partition of `items`, as lists of blocks.
std::vector<Partition> set_partitions(const std::vector<PointIndex>& items) {
  std::vector<Partition> out;
  Partition cur;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == items.size()) {
      out.push_back(cur);
      return;
    }
    // index access: the recursion may reallocate cur
    for (std::size_t b = 0; b < cur.size(); ++b) {
      cur[b].push_back(items[i]);
      rec(i + 1);
      cur[b].pop_back();
    }
    cur.push_back({items[i]});
    rec(i + 1);
    cur.pop_back();
  };
  rec(0);
  return out;
}

double cell_diam(const FiniteMetricSpace& s, const Cell& c) {
  double d = 0.0;
  for (PointIndex x : c)
    for (PointIndex y : c) d = std::max(d, s(x, y));
  return d;
}

double diam_of(const FiniteMetricSpace& s, const Partition& p, PointIndex x) {
  for (const auto& c : p)
    if (std::find(c.begin(), c.end(), x) != c.end()) return cell_diam(s, c);
  return std::numeric_limits<double>::quiet_NaN();
}

// Infimum over chains {T} >= P1 (<= 3 cells) >= P2 >= singletons, alpha = 2, p = 1,
// for |T| <= 6 so that level 3 is already all singletons.
double oracle_gamma(const FiniteMetricSpace& s) {
  std::vector<PointIndex> t(s.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<PointIndex>(i);
  const double top = cell_diam(s, t);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p1 : set_partitions(t)) {
    if (p1.size() > 3) continue;
    // refinements: each block of p1 split independently
    std::vector<std::vector<Partition>> options;
    for (const auto& block : p1) options.push_back(set_partitions(block));
    std::vector<std::size_t> pick(options.size(), 0);
    while (true) {
      Partition p2;
      for (std::size_t b = 0; b < options.size(); ++b)
        for (const auto& c : options[b][pick[b]]) p2.push_back(c);
      double sup = 0.0;
      for (PointIndex x : t) sup = std::max(sup, top + std::sqrt(2.0) * diam_of(s, p1, x) + 2.0 * diam_of(s, p2, x));
      best = std::min(best, sup);
      std::size_t b = 0;
      while (b < pick.size() && ++pick[b] == options[b].size()) pick[b++] = 0;
      if (b == pick.size()) break;
    }
  }
  return best;
}

FiniteMetricSpace line(std::vector<double> xs) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(xs.size()), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = xs[i];
  return build_space(m, norms::Euclidean{});
}

}  // namespace

TEST_CASE("value of a hand sequence") {
  const auto s = line({0, 1});
  AdmissibleSequence seq{{0, 1}, {{{0, 1}}, {{0}, {1}}}};
  CHECK(audit_admissible(seq).ok);
  CHECK(value(s, seq, 2.0, 1.0) == 1.0);
  const auto one = line({0});
  AdmissibleSequence single{{0}, {{{0}}}};
  CHECK(value(one, single, 2.0, 1.0) == 0.0);
}

TEST_CASE("admissibility audit catches each failure") {
  AdmissibleSequence ok{{0, 1, 2, 3}, {{{0, 1, 2, 3}}, {{0, 1}, {2, 3}}, {{0}, {1}, {2}, {3}}}};
  CHECK(audit_admissible(ok).ok);
  auto bad_top = ok;
  bad_top.levels[0] = {{0, 1}, {2, 3}};
  CHECK_FALSE(audit_admissible(bad_top).ok);
  auto not_nested = ok;
  not_nested.levels[2] = {{0, 2}, {1}, {3}};
  CHECK_FALSE(audit_admissible(not_nested).ok);
  AdmissibleSequence too_many{{0, 1, 2, 3}, {{{0, 1, 2, 3}}, {{0}, {1}, {2}, {3}}}};
  CHECK_FALSE(audit_admissible(too_many).ok);  // 4 cells > 3 at level 1
  auto missing = ok;
  missing.levels[1] = {{0, 1}, {2}};
  CHECK_FALSE(audit_admissible(missing).ok);
}

TEST_CASE("singleton continuation") {
  AdmissibleSequence seq{{0, 1, 2, 3, 4}, {{{0, 1, 2, 3, 4}}, {{0, 1}, {2, 3, 4}}}};
  continue_to_singletons(seq);
  CHECK(audit_admissible(seq).ok);
  CHECK(seq.levels.back().size() == 5);
  // level 2 admits 15 cells, so the singletons arrive there
  CHECK(seq.n_max() == 2);
}

TEST_CASE("gamma_exact matches chain enumeration") {
  const auto two = line({0, 1});
  CHECK(gamma_exact(two, SubsetView::all(two), 2.0, 1.0).value == doctest::Approx(1.0));
  const auto col = line({0, 1, 10});
  const auto g = gamma_exact(col, SubsetView::all(col), 2.0, 1.0);
  CHECK(g.value <= 10.0 + std::sqrt(2.0) + 1e-12);
  CHECK(g.value == doctest::Approx(oracle_gamma(col)).epsilon(1e-12));
  CHECK(audit_admissible(g.witness).ok);
  CHECK(value(col, g.witness, 2.0, 1.0) == doctest::Approx(g.value).epsilon(1e-12));

  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto s = testsupport::random_space(seed, 3 + static_cast<int>(seed % 4));
    const auto r = gamma_exact(s, SubsetView::all(s), 2.0, 1.0);
    CHECK(r.value == doctest::Approx(oracle_gamma(s)).epsilon(1e-12));
    CHECK(audit_admissible(r.witness).ok);
  }
}

TEST_CASE("gamma_exact is below every admissible sequence") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = testsupport::random_space(seed, 6);
    const auto t = SubsetView::all(s);
    const double best = gamma_exact(s, t, 2.0, 1.0).value;
    Rng rng = block_rng(seed, 1);
    for (int trial = 0; trial < 20; ++trial) {
      // random chain: 3 random cells, then random halving, then singletons
      std::uniform_int_distribution<int> pick(0, 2);
      std::vector<Cell> p1(3);
      for (PointIndex x = 0; x < 6; ++x) p1[static_cast<std::size_t>(pick(rng))].push_back(x);
      std::erase_if(p1, [](const Cell& c) { return c.empty(); });
      Partition p2;
      for (const auto& c : p1) {
        Cell a, b;
        for (PointIndex x : c) (pick(rng) == 0 ? a : b).push_back(x);
        if (!a.empty()) p2.push_back(a);
        if (!b.empty()) p2.push_back(b);
      }
      AdmissibleSequence seq{{0, 1, 2, 3, 4, 5}, {{{0, 1, 2, 3, 4, 5}}, p1, p2}};
      continue_to_singletons(seq);
      REQUIRE(audit_admissible(seq).ok);
      CHECK(value(s, seq, 2.0, 1.0) >= best - 1e-12);
    }
  }
}

TEST_CASE("piece splitting respects the diameter bound") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = testsupport::random_space(seed, 12);
    std::vector<PointIndex> pts(12);
    for (int i = 0; i < 12; ++i) pts[static_cast<std::size_t>(i)] = i;
    const double d = diam(SubsetView::all(s));
    for (double frac : {0.3, 0.6, 1.0}) {
      const auto split = split_into_pieces(s, pts, frac * d, 15);
      std::vector<PointIndex> seen;
      for (const auto& p : split.pieces) {
        seen.insert(seen.end(), p.begin(), p.end());
        if (split.within_bound) CHECK(cell_diam(s, p) <= frac * d);
      }
      std::sort(seen.begin(), seen.end());
      CHECK(seen == pts);
      CHECK(split.pieces.size() <= 15);
    }
  }
}

TEST_CASE("contraction builder on the trivial controls") {
  const auto one = line({0});
  ControlMatrix c1{Eigen::MatrixXd::Zero(3, 1), 0.0};
  const auto single = contraction_build(one, SubsetView::all(one), c1, 2.0, 2);
  CHECK(single.audit.ok);
  CHECK(value(one, single.seq, 2.0, 1.0) == 0.0);

  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto s = testsupport::random_space(500 + seed, 6);
    const auto t = SubsetView::all(s);
    const auto best = gamma_exact(s, t, 2.0, 1.0);
    const int n_max = best.witness.n_max();
    const auto ctrl = controls_from_sequence(s, best.witness, n_max);
    const auto out = contraction_build(s, t, ctrl, 2.0, n_max);
    CHECK(out.audit.ok);
    CHECK(out.violations.empty());
    CHECK(check_recursion(s, out.seq, ctrl, 2.0, n_max).empty());
    CHECK(value(s, out.seq, 2.0, 1.0) <= 64.0 * best.value + 1e-12);
  }
}

TEST_CASE("contraction builder on 8-point spaces stays admissible") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = testsupport::random_space(800 + seed, 8);
    const auto t = SubsetView::all(s);
    // controls: the diameters of a greedy halving chain
    AdmissibleSequence seq{{0, 1, 2, 3, 4, 5, 6, 7},
                           {{{0, 1, 2, 3, 4, 5, 6, 7}}, {{0, 1, 2, 3}, {4, 5, 6, 7}}, {{0, 1}, {2, 3}, {4, 5}, {6, 7}}}};
    continue_to_singletons(seq);
    const auto ctrl = controls_from_sequence(s, seq, seq.n_max());
    const auto out = contraction_build(s, t, ctrl, 2.0, seq.n_max());
    CHECK(out.audit.ok);
    CHECK(out.violations.empty());
  }
}

TEST_CASE("nets and partitions convert both ways") {
  const auto two = line({0, 1});
  AdmissibleSequence split{{0, 1}, {{{0, 1}}, {{0}, {1}}}};
  const auto nets = partition_to_nets(split);
  CHECK(net_value(two, SubsetView::all(two), nets, 2.0, 1.0) <= value(two, split, 2.0, 1.0));

  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto s = testsupport::random_space(300 + seed, 6);
    const auto t = SubsetView::all(s);
    const auto best = gamma_exact(s, t, 2.0, 1.0);
    const auto n = partition_to_nets(best.witness);
    for (std::size_t k = 0; k < n.size(); ++k) CHECK(n[k].size() <= net_cap(static_cast<int>(k)));
    const double nv = net_value(s, t, n, 2.0, 1.0);
    CHECK(nv <= best.value + 1e-12);
    const auto back = nets_to_partition(s, t, n, 2.0);
    CHECK(back.audit.ok);
    CHECK(value(s, back.seq, 2.0, 1.0) <= 64.0 * nv + 1e-12);
    CHECK(value(s, back.seq, 2.0, 1.0) >= best.value - 1e-12);
  }
}

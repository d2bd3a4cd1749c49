// Serial reference vs OpenMP kernels: wall time and bitwise agreement.
// Usage: bench_kernels [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>

#include <Eigen/Dense>

#include "chainlab/entropy.hpp"
#include "chainlab/gaussian.hpp"
#include "chainlab/matrix_bounds.hpp"
#include "chainlab/metric.hpp"
#include "chainlab/parallel.hpp"
#include "chainlab/rng.hpp"

using namespace chainlab;

namespace {

double best_of(int repeats, const std::function<void()>& f) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto start = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  return best;
}

void line(const std::string& kernel, double serial, double parallel, bool same) {
  std::printf("%-34s %10.4f %10.4f %8.2fx  %s\n", kernel.c_str(), serial, parallel, serial / parallel,
              same ? "identical" : "MISMATCH");
}

Eigen::MatrixXd normal_matrix(int rows, int cols, std::uint64_t seed) {
  Rng rng = block_rng(seed, 0);
  std::normal_distribution<double> g;
  Eigen::MatrixXd x(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) x(i, j) = g(rng);
  return x;
}

}  // namespace

int main(int argc, char** argv) {
  apply_worker_cap_from_env();
  const int repeats = argc > 1 ? std::max(1, std::atoi(argv[1])) : 3;
  std::printf("workers: %d, best of %d\n", worker_count(), repeats);
  std::printf("%-34s %10s %10s %9s\n", "kernel", "serial s", "parallel s", "speedup");
  bool all_same = true;

  {
    // exact entropy: brute force over nets of size 15 in a 20-point space
    const FiniteMetricSpace s = build_space(normal_matrix(20, 3, 1), norms::Euclidean{});
    const SubsetView t = SubsetView::all(s);
    EntropyResult ser, par;
    const double ts = best_of(repeats, [&] { ser = exact_entropy_serial(t, 2, t); });
    const double tp = best_of(repeats, [&] { par = entropy_number(t, 2, EntropyMethod::kExact, t, Execution::kParallel); });
    const bool same = ser.value == par.value && ser.net == par.net;
    all_same = all_same && same;
    line("exact entropy (20 pts, n=2)", ts, tp, same);
  }
  {
    const GaussianProcess proc = GaussianProcess::from_points(normal_matrix(32, 8, 2));
    Eigen::MatrixXd a, b;
    const double ts = best_of(repeats, [&] { a = ProcessSamples(proc, 20000, 5, Execution::kSerial).draws(); });
    const double tp = best_of(repeats, [&] { b = ProcessSamples(proc, 20000, 5, Execution::kParallel).draws(); });
    const bool same = a == b;
    all_same = all_same && same;
    line("process sampling (32 x 20000)", ts, tp, same);

    const ProcessSamples draws(proc, 20000, 5);
    const FiniteMetricSpace metric = proc.natural_metric();
    std::vector<BallWidths> ws, wp;
    const double bs = best_of(repeats, [&] { ws = ball_widths(metric, draws, Execution::kSerial); });
    const double bp = best_of(repeats, [&] { wp = ball_widths(metric, draws, Execution::kParallel); });
    bool bsame = ws.size() == wp.size();
    for (std::size_t i = 0; bsame && i < ws.size(); ++i) bsame = ws[i].width == wp[i].width && ws[i].se == wp[i].se;
    all_same = all_same && bsame;
    line("ball-width tables (32 pts)", bs, bp, bsame);
  }
  {
    std::vector<Eigen::MatrixXd> mats;
    for (int k = 0; k < 20; ++k) {
      const Eigen::MatrixXd g = normal_matrix(16, 16, 100 + static_cast<std::uint64_t>(k));
      mats.push_back(0.5 * (g + g.transpose()));
    }
    const CoefficientEnsemble ens = ensemble_from_matrices(mats);
    MatrixSamples a, b;
    const double ts = best_of(repeats, [&] { a = sample_matrices(ens, 4000, 9, Execution::kSerial); });
    const double tp = best_of(repeats, [&] { b = sample_matrices(ens, 4000, 9, Execution::kParallel); });
    const bool same = a.spectral == b.spectral && a.row_max == b.row_max;
    all_same = all_same && same;
    line("matrix sampling (d=16, m=20, 4000)", ts, tp, same);
  }
  return all_same ? 0 : 1;
}

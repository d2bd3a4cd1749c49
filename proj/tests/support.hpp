#pragma once

// Seeded instance generators shared by the unit tests and the acceptance run.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "chainlab/gaussian.hpp"
#include "chainlab/geometry.hpp"
#include "chainlab/matrix_bounds.hpp"
#include "chainlab/metric.hpp"
#include "chainlab/rng.hpp"

namespace testsupport {

using namespace chainlab;

inline Eigen::MatrixXd uniform_points(int n, int dim, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd x(n, dim);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < dim; ++j) x(i, j) = u(rng);
  return x;
}

inline Eigen::MatrixXd gaussian_matrix(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd x(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) x(i, j) = g(rng);
  return x;
}

/// Random point cloud under one of three norms, cycling with the seed.
/// Every fourth space is a clustered cloud so that level splits matter.
inline FiniteMetricSpace random_space(std::uint64_t seed, int n) {
  Rng rng = block_rng(seed, 0);
  const int dim = 1 + static_cast<int>(seed % 3);
  Eigen::MatrixXd x = uniform_points(n, dim, rng);
  if (seed % 4 == 3) {
    std::uniform_int_distribution<int> c(0, 2);
    for (int i = 0; i < n; ++i) {
      x.row(i) *= 0.1;
      x(i, 0) += c(rng);
    }
  }
  switch (seed % 3) {
    case 0: return build_space(x, norms::Euclidean{});
    case 1: return build_space(x, norms::L1{});
    default: return build_space(x, norms::LInf{});
  }
}

/// Random penalty in [0, 1) per point.
inline std::vector<double> random_penalty(std::size_t n, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> f(n);
  for (auto& v : f) v = u(rng);
  return f;
}

/// Gaussian process corpus: i.i.d. coordinates, random Gram matrices,
/// Brownian motion on a grid, and ellipsoid-shaped point clouds.
inline GaussianProcess corpus_process(int index) {
  Rng rng = block_rng(9000 + static_cast<std::uint64_t>(index), 0);
  const int kind = index % 4;
  const int size = 8 + 8 * ((index / 4) % 4);  // 8, 16, 24, 32
  switch (kind) {
    case 0: return GaussianProcess(Eigen::MatrixXd::Identity(size, size));
    case 1: return GaussianProcess::from_points(gaussian_matrix(size, 1 + index % 5, rng));
    case 2: {
      Eigen::MatrixXd cov(size, size);
      for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j) cov(i, j) = (std::min(i, j) + 1.0) / size;
      return GaussianProcess(cov);
    }
    default: {
      // points of {sum_k k y_k^2 <= 1}
      const int dim = 6;
      Eigen::MatrixXd y = gaussian_matrix(size, dim, rng);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (int i = 0; i < size; ++i) {
        double norm = 0.0;
        for (int k = 0; k < dim; ++k) norm += (k + 1) * y(i, k) * y(i, k);
        y.row(i) *= std::pow(u(rng), 1.0 / dim) / std::sqrt(norm);
      }
      return GaussianProcess::from_points(y);
    }
  }
}

inline Eigen::MatrixXd random_psd(int d, int rank, Rng& rng) {
  const Eigen::MatrixXd g = gaussian_matrix(d, rank, rng);
  return g * g.transpose() / rank;
}

inline Eigen::MatrixXd random_symmetric(int d, Rng& rng) {
  const Eigen::MatrixXd g = gaussian_matrix(d, d, rng);
  return 0.5 * (g + g.transpose());
}

inline Eigen::VectorXd unit_vector(int d, Rng& rng) {
  Eigen::VectorXd v = gaussian_matrix(d, 1, rng).col(0);
  return v / v.norm();
}

}  // namespace testsupport

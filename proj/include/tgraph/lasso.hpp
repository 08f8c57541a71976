#pragma once

#include <Eigen/Dense>

#include <span>

#include "tgraph/core.hpp"

namespace tgraph {

struct LassoOptions {
  int max_iter = 1000;
  /// Stop when the largest coordinate move, in gradient units, falls below
  /// tol times the largest |b_k|.
  double tol = 1e-10;
};

struct LassoStats {
  int iterations = 0;
  bool converged = false;
};

inline double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

/**
 * Coordinate descent for the covariance-form lasso
 *
 *   minimise  1/2 beta' A beta - b' beta + penalty * sum_{k in coords} |beta_k|
 *
 * over the coordinates listed in `coords`; every other entry of `beta` is
 * held at its incoming value and is expected to be zero. `beta` carries the
 * warm start in and the solution out. A must be symmetric PSD with positive
 * diagonal on `coords`; coordinates with A_kk <= 0 are pinned to zero.
 */
LassoStats gram_lasso_cd(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double penalty,
                         std::span<const Index> coords, Eigen::VectorXd& beta,
                         const LassoOptions& opts = {});

}  // namespace tgraph

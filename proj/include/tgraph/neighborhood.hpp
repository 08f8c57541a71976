#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "tgraph/core.hpp"
#include "tgraph/estimate.hpp"
#include "tgraph/lasso.hpp"

namespace tgraph {

/// Minimises ||y - X theta||_2^2 + lambda ||theta||_1 by coordinate descent.
Eigen::VectorXd lasso_cd(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                         const LassoOptions& opts = {});

/// Largest violation of the lasso optimality conditions for the program above.
double lasso_kkt_residual(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          const Eigen::VectorXd& theta, double lambda);

enum class CombineRule { kAnd, kOr };

struct NeighborhoodFit {
  /// Row j holds the coefficients of node j regressed on all others; zero diagonal.
  Eigen::MatrixXd coef;
  std::vector<double> lambda_per_node;
  CombineRule rule = CombineRule::kAnd;
  EdgeSet edges;
  bool converged = true;
};

/**
 * Meinshausen-Buhlmann neighbourhood selection.
 *
 * Columns are centred and scaled to ||x_j||^2 / n = 1. Node j's lasso is
 * posed per observation,
 *
 *   (1/2n) ||x_j - X_{-j} theta||^2 + lambda_j ||theta||_1,
 *
 * which is lasso_cd with penalty 2 n lambda_j, so lambda lives on the same
 * correlation scale as the graphical lasso penalty.
 */
NeighborhoodFit fit_neighborhood(const DataMatrix& data, double lambda,
                                 CombineRule rule = CombineRule::kAnd,
                                 const LassoOptions& opts = {});
NeighborhoodFit fit_neighborhood(const DataMatrix& data, std::span<const double> lambda_per_node,
                                 CombineRule rule = CombineRule::kAnd,
                                 const LassoOptions& opts = {});

/// Per-node KKT residual of a fit, on the per-observation scale.
double neighborhood_kkt_residual(const DataMatrix& data, const NeighborhoodFit& fit);

/**
 * Symmetric summary of a fit for thresholding: entry (i, j) is whichever
 * of coef(i, j), coef(j, i) has the smaller magnitude under AND and the
 * larger under OR, so thresholding it at tau keeps exactly the pairs whose
 * combined vote survives tau. Unit diagonal.
 */
PrecisionEstimate neighborhood_estimate(const NeighborhoodFit& fit);

}  // namespace tgraph

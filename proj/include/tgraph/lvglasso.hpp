#pragma once

#include <Eigen/Dense>

#include "tgraph/core.hpp"

namespace tgraph {

struct LvglassoOptions {
  int max_iter = 5000;
  /// Stop once max(primal, dual) relative residual < tol.
  double tol = 1e-6;
  double rho = 1.0;
  /// Double/halve rho when one residual exceeds the other tenfold.
  bool adapt_rho = true;
};

/// ADMM iterate carried between fits for warm starts.
struct LvglassoState {
  Eigen::MatrixXd r;
  Eigen::MatrixXd s;
  Eigen::MatrixXd l;
  Eigen::MatrixXd dual;
  double rho = 1.0;
};

struct LatentDecomposition {
  SymMat s_hat;
  SymMat l_hat;
  double lambda = 0.0;
  double gamma = 0.0;
  int iterations = 0;
  bool converged = false;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double objective = 0.0;
  LvglassoState state;
};

/**
 * Sparse-plus-low-rank penalised likelihood:
 *
 *   minimise tr((S - L) Sigma) - log det(S - L) + lambda (gamma sum_{j != k} |S_jk| + tr L)
 *   subject to S - L > 0, L >= 0.
 *
 * ADMM on the split R = S - L: R takes the log-det proximal step, S an
 * off-diagonal soft threshold, L an eigenvalue shift by -lambda / rho
 * clipped at zero. Starts from S = 2 diag(1 / Sigma_ii), L = 0 unless a warm
 * state is supplied.
 *
 * Throws NumericError on non-finite iterates and NotPositiveDefiniteError if
 * the returned S - L is not positive definite.
 */
LatentDecomposition fit_lvglasso(const SymMat& sigma_hat, double lambda, double gamma,
                                 const LvglassoOptions& opts = {},
                                 const LvglassoState* warm = nullptr);

double lvglasso_objective(const SymMat& s, const SymMat& l, const SymMat& sigma_hat, double lambda,
                          double gamma);

/// Support of the sparse component.
EdgeSet lv_edge_set(const LatentDecomposition& fit, double tol = kDefaultEdgeTol);

/// Number of eigenvalues of L above tol.
int latent_rank(const LatentDecomposition& fit, double tol = 1e-6);

}  // namespace tgraph

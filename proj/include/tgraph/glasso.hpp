#pragma once

#include <span>
#include <vector>

#include "tgraph/core.hpp"
#include "tgraph/estimate.hpp"

namespace tgraph {

/**
 * Graphical lasso: minimise
 *
 *   tr(S Theta) - log det Theta + lambda * sum_{j != k} |Theta_jk|
 *
 * over positive definite Theta; the diagonal is not penalised.
 *
 * Solved by block coordinate descent on the covariance iterate W, one
 * column at a time, each column being a covariance-form lasso. The outer
 * loop stops once the mean absolute change of W's off-diagonal entries
 * over a sweep drops below opts.tol times the mean |S| off-diagonal
 * magnitude. Hitting opts.max_iter returns converged = false.
 *
 * Throws DegenerateInputError if a diagonal entry of S is not positive and
 * NotPositiveDefiniteError if the iterate loses definiteness (lambda too
 * small for a singular S).
 */
PrecisionEstimate fit_glasso(const SymMat& sigma_hat, double lambda, const SolverOptions& opts = {});

/// As fit_glasso, with every off-diagonal entry outside `support` held at zero.
PrecisionEstimate fit_glasso_on_support(const SymMat& sigma_hat, double lambda,
                                        const EdgeSet& support, const SolverOptions& opts = {});

/// One fit per lambda (strictly positive, strictly descending), each warm
/// started from the previous solution.
std::vector<PrecisionEstimate> fit_glasso_path(const SymMat& sigma_hat,
                                               std::span<const double> lambdas,
                                               const SolverOptions& opts = {});

/// Penalised negative log-likelihood at a positive definite theta.
double glasso_objective(const SymMat& theta, const SymMat& sigma_hat, double lambda);

/// Largest violation of the stationarity conditions S - Theta^{-1} + lambda Z = 0.
double kkt_residual(const PrecisionEstimate& est, const SymMat& sigma_hat, double lambda);

}  // namespace tgraph

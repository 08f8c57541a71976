#pragma once

#include <Eigen/Dense>

#include <vector>

#include "tgraph/core.hpp"
#include "tgraph/estimate.hpp"

namespace tgraph {

struct ClimeFit {
  /// Symmetrised estimate (min-magnitude rule).
  PrecisionEstimate estimate;
  /// Column solutions before symmetrisation.
  Eigen::MatrixXd omega_tilde;
  /// ||omega_j||_1 per column.
  std::vector<double> column_objective;
  /// max_j ||S omega_j - e_j||_inf - lambda (<= 0 up to rounding when feasible).
  double max_violation = 0.0;
};

/**
 * CLIME. Column j solves
 *
 *   minimise ||w||_1  subject to  ||S w - e_j||_inf <= lambda
 *
 * as a linear program over the split w = w+ - w-, solved exactly by the
 * simplex method. Columns are assembled into Omega~ and symmetrised by
 * keeping, for each pair, the entry of smaller magnitude. The result is not
 * necessarily positive definite.
 *
 * Throws NumericError naming the column if a column LP is infeasible or its
 * solution violates the constraint by more than opts.tol.
 */
ClimeFit solve_clime(const SymMat& sigma_hat, double lambda, const SolverOptions& opts = {});

PrecisionEstimate fit_clime(const SymMat& sigma_hat, double lambda, const SolverOptions& opts = {});

}  // namespace tgraph

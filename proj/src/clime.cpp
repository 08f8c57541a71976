#include "tgraph/clime.hpp"

#include <fmt/core.h>

#include <cmath>
#include <stdexcept>

#include "simplex.hpp"

namespace tgraph {

ClimeFit solve_clime(const SymMat& sigma_hat, double lambda, const SolverOptions& opts) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument(fmt::format("clime: lambda must be finite and > 0, got {}", lambda));
  }
  const Index p = sigma_hat.dim();
  for (Index i = 0; i < p; ++i) {
    if (!(sigma_hat(i, i) > 0.0)) {
      throw DegenerateInputError(
          fmt::format("clime: variable {} has non-positive variance {}", i, sigma_hat(i, i)),
          static_cast<int>(i));
    }
  }
  const Eigen::MatrixXd& s = sigma_hat.matrix();

  // Rows: S(u - v) <= e_j + lambda and -S(u - v) <= lambda - e_j.
  Eigen::MatrixXd a(2 * p, 2 * p);
  a << s, -s, -s, s;
  const Eigen::VectorXd cost = Eigen::VectorXd::Ones(2 * p);

  ClimeFit fit;
  fit.omega_tilde = Eigen::MatrixXd::Zero(p, p);
  fit.column_objective.resize(static_cast<std::size_t>(p));
  fit.max_violation = -lambda;
  int pivots = 0;
  for (Index j = 0; j < p; ++j) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Constant(2 * p, lambda);
    rhs(j) += 1.0;
    rhs(p + j) -= 1.0;
    detail::LpSolution lp;
    try {
      lp = detail::solve_lp(a, rhs, cost);
    } catch (const NumericError& e) {
      throw NumericError(fmt::format("clime: column {}: {}", j, e.what()));
    }
    pivots += lp.pivots;
    const Eigen::VectorXd omega = lp.x.head(p) - lp.x.tail(p);
    Eigen::VectorXd resid = s * omega;
    resid(j) -= 1.0;
    const double violation = resid.cwiseAbs().maxCoeff() - lambda;
    if (violation > opts.tol) {
      throw NumericError(fmt::format(
          "clime: column {} violates the constraint by {:.3e} (tolerance {:.1e})", j, violation,
          opts.tol));
    }
    fit.max_violation = std::max(fit.max_violation, violation);
    fit.omega_tilde.col(j) = omega;
    fit.column_objective[static_cast<std::size_t>(j)] = omega.cwiseAbs().sum();
  }

  Eigen::MatrixXd sym(p, p);
  for (Index j = 0; j < p; ++j) {
    sym(j, j) = fit.omega_tilde(j, j);
    for (Index i = 0; i < j; ++i) {
      const double a_ij = fit.omega_tilde(i, j);
      const double a_ji = fit.omega_tilde(j, i);
      sym(i, j) = sym(j, i) = std::abs(a_ij) <= std::abs(a_ji) ? a_ij : a_ji;
    }
  }
  fit.estimate.theta = SymMat::from_matrix(std::move(sym));
  fit.estimate.lambda = lambda;
  fit.estimate.method = EstimateMethod::kClime;
  fit.estimate.iterations = pivots;
  fit.estimate.converged = true;
  double total = 0.0;
  for (double v : fit.column_objective) total += v;
  fit.estimate.objective = total;
  return fit;
}

PrecisionEstimate fit_clime(const SymMat& sigma_hat, double lambda, const SolverOptions& opts) {
  return solve_clime(sigma_hat, lambda, opts).estimate;
}

}  // namespace tgraph

#include "tgraph/glasso.hpp"

#include <fmt/core.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "tgraph/lasso.hpp"

namespace tgraph {

namespace {

void check_inputs(const SymMat& sigma_hat, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument(fmt::format("glasso: lambda must be finite and >= 0, got {}", lambda));
  }
  if (sigma_hat.dim() < 1) throw std::invalid_argument("glasso: empty covariance");
  for (Index i = 0; i < sigma_hat.dim(); ++i) {
    if (!(sigma_hat(i, i) > 0.0)) {
      throw DegenerateInputError(
          fmt::format("glasso: variable {} has non-positive variance {}", i, sigma_hat(i, i)),
          static_cast<int>(i));
    }
  }
}

// Covariance iterate W and per-column regression coefficients B. Column j
// of B holds the lasso solution for node j embedded at full size with a
// zero in row j.
struct GlassoState {
  Eigen::MatrixXd w;
  Eigen::MatrixXd b;
};

PrecisionEstimate solve(const SymMat& sigma_hat, double lambda, const EdgeSet* support,
                        const SolverOptions& opts, GlassoState& state) {
  const Index p = sigma_hat.dim();
  const Eigen::MatrixXd& s = sigma_hat.matrix();

  if (state.w.rows() != p) {
    state.w = s;
    state.b = Eigen::MatrixXd::Zero(p, p);
  }
  Eigen::MatrixXd& w = state.w;
  Eigen::MatrixXd& b = state.b;

  std::vector<std::vector<Index>> coords(static_cast<std::size_t>(p));
  for (Index j = 0; j < p; ++j) {
    for (Index k = 0; k < p; ++k) {
      if (k == j) continue;
      if (support != nullptr && !support->contains(static_cast<int>(j), static_cast<int>(k))) {
        b(k, j) = 0.0;
        continue;
      }
      coords[static_cast<std::size_t>(j)].push_back(k);
    }
  }

  double scale = 0.0;
  if (p > 1) {
    scale = (s.cwiseAbs().sum() - s.diagonal().cwiseAbs().sum()) / static_cast<double>(p * (p - 1));
  }
  if (!(scale > 0.0)) scale = s.diagonal().mean();

  const LassoOptions inner{opts.inner_max_iter, opts.inner_tol};
  PrecisionEstimate est;
  est.lambda = lambda;
  est.method = EstimateMethod::kGlasso;
  est.converged = p < 2;

  Eigen::VectorXd beta(p);
  Eigen::VectorXd w12(p);
  for (int sweep = 1; sweep <= opts.max_iter && p > 1; ++sweep) {
    est.iterations = sweep;
    double change = 0.0;
    for (Index j = 0; j < p; ++j) {
      beta = b.col(j);
      gram_lasso_cd(w, s.col(j), lambda, coords[static_cast<std::size_t>(j)], beta, inner);
      w12.noalias() = w * beta;
      for (Index k = 0; k < p; ++k) {
        if (k == j) continue;
        change += std::abs(w12(k) - w(k, j));
        w(k, j) = w12(k);
        w(j, k) = w12(k);
      }
      w(j, j) = s(j, j);
      b.col(j) = beta;
      const double schur = s(j, j) - w12.dot(beta);
      if (!(schur > 1e-12 * s(j, j)) || !std::isfinite(schur)) {
        throw NotPositiveDefiniteError(
            fmt::format("glasso: covariance iterate lost positive definiteness at column {} "
                        "(lambda {} too small for this covariance)",
                        j, lambda),
            schur);
      }
    }
    const double mean_change = change / static_cast<double>(p * (p - 1));
    if (mean_change < opts.tol * scale) {
      est.converged = true;
      break;
    }
  }

  Eigen::MatrixXd theta(p, p);
  for (Index j = 0; j < p; ++j) {
    const double schur = s(j, j) - w.col(j).dot(b.col(j));
    const double tjj = 1.0 / schur;
    theta.col(j) = -b.col(j) * tjj;
    theta(j, j) = tjj;
  }
  est.theta = SymMat::symmetrized(theta);
  est.objective = glasso_objective(est.theta, sigma_hat, lambda);
  return est;
}

}  // namespace

double glasso_objective(const SymMat& theta, const SymMat& sigma_hat, double lambda) {
  const Eigen::MatrixXd& t = theta.matrix();
  const double l1_off = t.cwiseAbs().sum() - t.diagonal().cwiseAbs().sum();
  return trace_product(sigma_hat, theta) - log_det(theta) + lambda * l1_off;
}

PrecisionEstimate fit_glasso(const SymMat& sigma_hat, double lambda, const SolverOptions& opts) {
  check_inputs(sigma_hat, lambda);
  GlassoState state;
  return solve(sigma_hat, lambda, nullptr, opts, state);
}

PrecisionEstimate fit_glasso_on_support(const SymMat& sigma_hat, double lambda,
                                        const EdgeSet& support, const SolverOptions& opts) {
  check_inputs(sigma_hat, lambda);
  if (support.dim() != sigma_hat.dim()) {
    throw std::invalid_argument("fit_glasso_on_support: support dimension mismatch");
  }
  GlassoState state;
  return solve(sigma_hat, lambda, &support, opts, state);
}

std::vector<PrecisionEstimate> fit_glasso_path(const SymMat& sigma_hat,
                                               std::span<const double> lambdas,
                                               const SolverOptions& opts) {
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0)) throw std::invalid_argument("fit_glasso_path: lambdas must be > 0");
    if (i > 0 && !(lambdas[i] < lambdas[i - 1])) {
      throw std::invalid_argument("fit_glasso_path: lambdas must be strictly descending");
    }
  }
  std::vector<PrecisionEstimate> path;
  path.reserve(lambdas.size());
  GlassoState state;
  for (double lambda : lambdas) {
    check_inputs(sigma_hat, lambda);
    path.push_back(solve(sigma_hat, lambda, nullptr, opts, state));
  }
  return path;
}

double kkt_residual(const PrecisionEstimate& est, const SymMat& sigma_hat, double lambda) {
  if (est.theta.dim() != sigma_hat.dim()) throw std::invalid_argument("kkt_residual: dimension mismatch");
  const SymMat w = spd_inverse(est.theta);
  const Index p = sigma_hat.dim();
  double worst = 0.0;
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < p; ++i) {
      const double gap = sigma_hat(i, j) - w(i, j);
      double v;
      if (i == j) {
        v = std::abs(gap);
      } else if (est.theta(i, j) != 0.0) {
        v = std::abs(gap + lambda * (est.theta(i, j) > 0.0 ? 1.0 : -1.0));
      } else {
        v = std::max(0.0, std::abs(gap) - lambda);
      }
      worst = std::max(worst, v);
    }
  }
  return worst;
}

}  // namespace tgraph

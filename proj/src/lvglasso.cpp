#include "tgraph/lvglasso.hpp"

#include <fmt/core.h>

#include <cmath>
#include <stdexcept>

#include "tgraph/lasso.hpp"

namespace tgraph {

namespace {

using Eigen::MatrixXd;

// V f(D) V' for the eigendecomposition of symmetric m.
template <typename F>
MatrixXd spectral_map(const MatrixXd& m, F&& f) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw NumericError("lvglasso: eigensolver failed");
  Eigen::VectorXd d = es.eigenvalues();
  for (Index i = 0; i < d.size(); ++i) d(i) = f(d(i));
  MatrixXd out = es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

}  // namespace

double lvglasso_objective(const SymMat& s, const SymMat& l, const SymMat& sigma_hat, double lambda,
                          double gamma) {
  const SymMat r = SymMat::symmetrized(s.matrix() - l.matrix());
  const MatrixXd& sm = s.matrix();
  const double l1_off = sm.cwiseAbs().sum() - sm.diagonal().cwiseAbs().sum();
  return trace_product(r, sigma_hat) - log_det(r) + lambda * (gamma * l1_off + l.matrix().trace());
}

LatentDecomposition fit_lvglasso(const SymMat& sigma_hat, double lambda, double gamma,
                                 const LvglassoOptions& opts, const LvglassoState* warm) {
  if (!(lambda > 0.0) || !(gamma > 0.0) || !std::isfinite(lambda) || !std::isfinite(gamma)) {
    throw std::invalid_argument(
        fmt::format("lvglasso: lambda and gamma must be finite and > 0, got {}, {}", lambda, gamma));
  }
  const Index p = sigma_hat.dim();
  for (Index i = 0; i < p; ++i) {
    if (!(sigma_hat(i, i) > 0.0)) {
      throw DegenerateInputError(
          fmt::format("lvglasso: variable {} has non-positive variance {}", i, sigma_hat(i, i)),
          static_cast<int>(i));
    }
  }
  const MatrixXd& sigma = sigma_hat.matrix();

  LvglassoState st;
  if (warm != nullptr && warm->s.rows() == p) {
    st = *warm;
  } else {
    st.s = MatrixXd(2.0 * sigma.diagonal().cwiseInverse().asDiagonal());
    st.l = MatrixXd::Zero(p, p);
    st.r = st.s;
    st.dual = MatrixXd::Zero(p, p);
    st.rho = opts.rho;
  }

  LatentDecomposition fit;
  fit.lambda = lambda;
  fit.gamma = gamma;
  const double l1_weight = lambda * gamma;

  MatrixXd prev_sl = st.s - st.l;
  for (int it = 1; it <= opts.max_iter; ++it) {
    fit.iterations = it;
    const double rho = st.rho;

    const MatrixXd x1 = rho * (st.s - st.l) - sigma - st.dual;
    st.r = spectral_map(x1, [rho](double x) { return (x + std::sqrt(x * x + 4.0 * rho)) / (2.0 * rho); });

    MatrixXd target = st.r + st.l + st.dual / rho;
    for (Index j = 0; j < p; ++j) {
      for (Index i = 0; i < p; ++i) {
        st.s(i, j) = i == j ? target(i, j) : soft_threshold(target(i, j), l1_weight / rho);
      }
    }
    st.s = 0.5 * (st.s + st.s.transpose()).eval();

    st.l = spectral_map(st.s - st.r - st.dual / rho,
                        [shift = lambda / rho](double x) { return std::max(x - shift, 0.0); });

    const MatrixXd gap = st.r - st.s + st.l;
    st.dual += rho * gap;

    const MatrixXd sl = st.s - st.l;
    fit.primal_residual = gap.norm() / std::max(1.0, st.r.norm());
    fit.dual_residual = rho * (sl - prev_sl).norm() / std::max(1.0, st.dual.norm());
    prev_sl = sl;

    if (!st.r.allFinite() || !st.s.allFinite() || !st.l.allFinite()) {
      throw NumericError(fmt::format("lvglasso: non-finite iterate at iteration {} (rho {})", it, rho));
    }
    if (std::max(fit.primal_residual, fit.dual_residual) < opts.tol) {
      fit.converged = true;
      break;
    }
    if (opts.adapt_rho) {
      if (fit.primal_residual > 10.0 * fit.dual_residual) {
        st.rho = rho * 2.0;
      } else if (fit.dual_residual > 10.0 * fit.primal_residual) {
        st.rho = rho / 2.0;
      }
    }
  }

  fit.s_hat = SymMat::symmetrized(st.s);
  fit.l_hat = SymMat::symmetrized(st.l);
  const SymMat marginal = SymMat::symmetrized(st.s - st.l);
  const double lo = min_eigenvalue(marginal);
  if (!(lo > 1e-10)) {
    throw NotPositiveDefiniteError(
        fmt::format("lvglasso: S - L not positive definite (min eigenvalue {:.3e})", lo), lo);
  }
  fit.objective = lvglasso_objective(fit.s_hat, fit.l_hat, sigma_hat, lambda, gamma);
  fit.state = std::move(st);
  return fit;
}

EdgeSet lv_edge_set(const LatentDecomposition& fit, double tol) { return edge_set(fit.s_hat, tol); }

int latent_rank(const LatentDecomposition& fit, double tol) {
  const auto eig = sym_eigen(fit.l_hat);
  int rank = 0;
  for (Index i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) > tol) ++rank;
  }
  return rank;
}

}  // namespace tgraph

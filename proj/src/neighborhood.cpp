#include "tgraph/neighborhood.hpp"

#include <fmt/core.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tgraph {

Eigen::VectorXd lasso_cd(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                         const LassoOptions& opts) {
  if (x.cols() < 1) throw std::invalid_argument("lasso_cd: need at least one predictor");
  if (x.rows() != y.size()) {
    throw std::invalid_argument(
        fmt::format("lasso_cd: {} rows in X but {} responses", x.rows(), y.size()));
  }
  if (!(lambda >= 0.0)) throw std::invalid_argument("lasso_cd: lambda must be >= 0");
  const Eigen::MatrixXd a = 2.0 * (x.transpose() * x);
  const Eigen::VectorXd b = 2.0 * (x.transpose() * y);
  std::vector<Index> coords(static_cast<std::size_t>(x.cols()));
  std::iota(coords.begin(), coords.end(), Index{0});
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(x.cols());
  gram_lasso_cd(a, b, lambda, coords, theta, opts);
  return theta;
}

double lasso_kkt_residual(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          const Eigen::VectorXd& theta, double lambda) {
  const Eigen::VectorXd g = 2.0 * (x.transpose() * (x * theta - y));
  double worst = 0.0;
  for (Index k = 0; k < g.size(); ++k) {
    const double v = theta(k) != 0.0 ? std::abs(g(k) + lambda * (theta(k) > 0 ? 1.0 : -1.0))
                                     : std::max(0.0, std::abs(g(k)) - lambda);
    worst = std::max(worst, v);
  }
  return worst;
}

namespace {

// Gram matrix of the centred, unit-scaled columns: X'X / n with unit diagonal.
Eigen::MatrixXd standardized_gram(const DataMatrix& data) {
  Eigen::MatrixXd x = data.values();
  x.rowwise() -= x.colwise().mean();
  const double n = static_cast<double>(data.n());
  for (Index j = 0; j < x.cols(); ++j) {
    const double ss = x.col(j).squaredNorm() / n;
    if (!(ss > 0.0)) {
      throw DegenerateInputError(fmt::format("neighborhood: column {} is constant", j),
                                 static_cast<int>(j));
    }
    x.col(j) /= std::sqrt(ss);
  }
  Eigen::MatrixXd g = (x.transpose() * x) / n;
  g = 0.5 * (g + g.transpose()).eval();
  g.diagonal().setOnes();
  return g;
}

EdgeSet combine(const Eigen::MatrixXd& coef, CombineRule rule) {
  const Index p = coef.rows();
  std::vector<Edge> edges;
  for (Index i = 0; i < p; ++i) {
    for (Index j = i + 1; j < p; ++j) {
      const bool a = coef(i, j) != 0.0;
      const bool b = coef(j, i) != 0.0;
      if (rule == CombineRule::kAnd ? (a && b) : (a || b)) {
        edges.push_back({static_cast<int>(i), static_cast<int>(j)});
      }
    }
  }
  return EdgeSet(static_cast<int>(p), std::move(edges));
}

}  // namespace

NeighborhoodFit fit_neighborhood(const DataMatrix& data, std::span<const double> lambda_per_node,
                                 CombineRule rule, const LassoOptions& opts) {
  const Index p = data.p();
  if (data.n() < 2 || p < 2) throw std::invalid_argument("fit_neighborhood: need n >= 2 and p >= 2");
  if (static_cast<Index>(lambda_per_node.size()) != p) {
    throw std::invalid_argument(fmt::format("fit_neighborhood: {} lambdas for {} nodes",
                                            lambda_per_node.size(), p));
  }
  for (double l : lambda_per_node) {
    if (!(l >= 0.0)) throw std::invalid_argument("fit_neighborhood: lambda must be >= 0");
  }
  const Eigen::MatrixXd gram = standardized_gram(data);

  NeighborhoodFit fit;
  fit.coef = Eigen::MatrixXd::Zero(p, p);
  fit.lambda_per_node.assign(lambda_per_node.begin(), lambda_per_node.end());
  fit.rule = rule;

  std::vector<Index> coords;
  Eigen::VectorXd beta(p);
  for (Index j = 0; j < p; ++j) {
    coords.clear();
    for (Index k = 0; k < p; ++k) {
      if (k != j) coords.push_back(k);
    }
    beta.setZero();
    const auto stats = gram_lasso_cd(gram, gram.col(j), lambda_per_node[static_cast<std::size_t>(j)],
                                     coords, beta, opts);
    fit.converged = fit.converged && stats.converged;
    fit.coef.row(j) = beta.transpose();
    fit.coef(j, j) = 0.0;
  }
  fit.edges = combine(fit.coef, rule);
  return fit;
}

NeighborhoodFit fit_neighborhood(const DataMatrix& data, double lambda, CombineRule rule,
                                 const LassoOptions& opts) {
  const std::vector<double> per_node(static_cast<std::size_t>(data.p()), lambda);
  return fit_neighborhood(data, per_node, rule, opts);
}

double neighborhood_kkt_residual(const DataMatrix& data, const NeighborhoodFit& fit) {
  const Eigen::MatrixXd gram = standardized_gram(data);
  const Index p = gram.rows();
  double worst = 0.0;
  for (Index j = 0; j < p; ++j) {
    const Eigen::VectorXd beta = fit.coef.row(j).transpose();
    const Eigen::VectorXd grad = gram * beta - gram.col(j);
    const double lambda = fit.lambda_per_node[static_cast<std::size_t>(j)];
    for (Index k = 0; k < p; ++k) {
      if (k == j) continue;
      const double v = beta(k) != 0.0 ? std::abs(grad(k) + lambda * (beta(k) > 0 ? 1.0 : -1.0))
                                      : std::max(0.0, std::abs(grad(k)) - lambda);
      worst = std::max(worst, v);
    }
  }
  return worst;
}

PrecisionEstimate neighborhood_estimate(const NeighborhoodFit& fit) {
  const Index p = fit.coef.rows();
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = i + 1; j < p; ++j) {
      const double a = fit.coef(i, j);
      const double b = fit.coef(j, i);
      const bool pick_a = fit.rule == CombineRule::kAnd ? std::abs(a) <= std::abs(b)
                                                        : std::abs(a) >= std::abs(b);
      m(i, j) = m(j, i) = pick_a ? a : b;
    }
  }
  PrecisionEstimate est;
  est.theta = SymMat::from_matrix(std::move(m));
  est.lambda = fit.lambda_per_node.empty() ? 0.0 : fit.lambda_per_node.front();
  est.method = EstimateMethod::kNeighborhood;
  est.converged = fit.converged;
  return est;
}

}  // namespace tgraph

#include "tgraph/core.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tgraph {

SymMat SymMat::from_matrix(Eigen::MatrixXd m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument(
        fmt::format("SymMat: matrix is {}x{}, not square", m.rows(), m.cols()));
  }
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < j; ++i) {
      if (m(i, j) != m(j, i)) {
        throw std::invalid_argument(
            fmt::format("SymMat: entry ({}, {}) differs from its transpose", i, j));
      }
    }
  }
  if (!m.allFinite()) throw std::invalid_argument("SymMat: non-finite entry");
  return SymMat(std::move(m));
}

SymMat SymMat::symmetrized(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument(
        fmt::format("SymMat: matrix is {}x{}, not square", m.rows(), m.cols()));
  }
  Eigen::MatrixXd s = 0.5 * (m + m.transpose());
  if (!s.allFinite()) throw std::invalid_argument("SymMat: non-finite entry");
  return SymMat(std::move(s));
}

SymMat SymMat::identity(Index p) { return SymMat(Eigen::MatrixXd::Identity(p, p)); }

SymMat SymMat::diagonal(const Eigen::VectorXd& d) {
  return SymMat(Eigen::MatrixXd(d.asDiagonal()));
}

SymMat SymMat::zero(Index p) { return SymMat(Eigen::MatrixXd::Zero(p, p)); }

double SymMat::max_abs_offdiag() const {
  double best = 0.0;
  for (Index j = 0; j < m_.cols(); ++j) {
    for (Index i = 0; i < j; ++i) best = std::max(best, std::abs(m_(i, j)));
  }
  return best;
}

DataMatrix::DataMatrix(Eigen::MatrixXd rows, std::vector<std::string> column_names)
    : x_(std::move(rows)), names_(std::move(column_names)) {
  if (x_.rows() < 1 || x_.cols() < 1) {
    throw DataError("DataMatrix: need at least one row and one column");
  }
  if (!names_.empty() && static_cast<Index>(names_.size()) != x_.cols()) {
    throw DataError(fmt::format("DataMatrix: {} column names for {} columns",
                                names_.size(), x_.cols()));
  }
  for (Index i = 0; i < x_.rows(); ++i) {
    for (Index j = 0; j < x_.cols(); ++j) {
      if (!std::isfinite(x_(i, j))) {
        throw DataError(fmt::format("DataMatrix: non-finite value at row {}, column {}", i, j));
      }
    }
  }
}

DataMatrix DataMatrix::rows(const std::vector<Index>& which) const {
  Eigen::MatrixXd out(static_cast<Index>(which.size()), x_.cols());
  for (std::size_t r = 0; r < which.size(); ++r) out.row(static_cast<Index>(r)) = x_.row(which[r]);
  return DataMatrix(std::move(out), names_);
}

EdgeSet::EdgeSet(int dim, std::vector<Edge> edges) : dim_(dim), edges_(std::move(edges)) {
  for (auto& e : edges_) {
    if (e.i > e.j) std::swap(e.i, e.j);
    if (e.i == e.j) throw std::invalid_argument(fmt::format("EdgeSet: self-loop at {}", e.i));
    if (e.i < 0 || e.j >= dim_) {
      throw std::invalid_argument(
          fmt::format("EdgeSet: edge ({}, {}) out of range for dim {}", e.i, e.j, dim_));
    }
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
}

bool EdgeSet::contains(int i, int j) const {
  if (i > j) std::swap(i, j);
  return std::binary_search(edges_.begin(), edges_.end(), Edge{i, j});
}

std::size_t EdgeSet::max_edges() const noexcept {
  const auto p = static_cast<std::size_t>(dim_);
  return p < 2 ? 0 : p * (p - 1) / 2;
}

bool EdgeSet::is_subset_of(const EdgeSet& other) const {
  return dim_ == other.dim_ &&
         std::includes(other.edges_.begin(), other.edges_.end(), edges_.begin(), edges_.end());
}

SymMat sample_covariance(const DataMatrix& data, bool center, CovarianceDenominator denom) {
  const Index n = data.n();
  if (n < 2) {
    throw DataError(fmt::format("sample_covariance: need at least 2 rows, got {}", n));
  }
  Eigen::MatrixXd x = data.values();
  if (center) x.rowwise() -= x.colwise().mean();
  const double scale =
      denom == CovarianceDenominator::kN ? static_cast<double>(n) : static_cast<double>(n - 1);
  Eigen::MatrixXd cov = (x.transpose() * x) / scale;
  return SymMat::symmetrized(cov);
}

SymMat to_correlation(const SymMat& cov) {
  const Index p = cov.dim();
  Eigen::VectorXd inv_sd(p);
  for (Index i = 0; i < p; ++i) {
    if (!(cov(i, i) > 0.0)) {
      throw DegenerateInputError(
          fmt::format("to_correlation: variable {} has non-positive variance {}", i, cov(i, i)),
          static_cast<int>(i));
    }
    inv_sd(i) = 1.0 / std::sqrt(cov(i, i));
  }
  Eigen::MatrixXd r = inv_sd.asDiagonal() * cov.matrix() * inv_sd.asDiagonal();
  r.diagonal().setOnes();
  return SymMat::symmetrized(r);
}

EdgeSet edge_set(const SymMat& m, double tol) {
  if (tol < 0.0) throw std::invalid_argument("edge_set: negative tolerance");
  std::vector<Edge> edges;
  const Index p = m.dim();
  for (Index i = 0; i < p; ++i) {
    for (Index j = i + 1; j < p; ++j) {
      if (std::abs(m(i, j)) > tol) edges.push_back({static_cast<int>(i), static_cast<int>(j)});
    }
  }
  return EdgeSet(static_cast<int>(p), std::move(edges));
}

SymEigen sym_eigen(const SymMat& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.matrix());
  if (es.info() != Eigen::Success) throw NumericError("sym_eigen: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

double min_eigenvalue(const SymMat& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.matrix(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("min_eigenvalue: eigensolver failed");
  return es.eigenvalues()(0);
}

namespace {

Eigen::LLT<Eigen::MatrixXd> checked_llt(const SymMat& m, double tol, const char* who) {
  if (tol > 0.0) {
    const double lo = min_eigenvalue(m);
    if (!(lo > tol)) {
      throw NotPositiveDefiniteError(
          fmt::format("{}: matrix not positive definite (min eigenvalue {:.3e})", who, lo), lo);
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(m.matrix());
  if (llt.info() != Eigen::Success) {
    const double lo = min_eigenvalue(m);
    throw NotPositiveDefiniteError(
        fmt::format("{}: matrix not positive definite (min eigenvalue {:.3e})", who, lo), lo);
  }
  return llt;
}

}  // namespace

SymMat spd_inverse(const SymMat& m, double tol) {
  auto llt = checked_llt(m, tol, "spd_inverse");
  Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(m.dim(), m.dim()));
  return SymMat::symmetrized(inv);
}

double log_det(const SymMat& m, double tol) {
  auto llt = checked_llt(m, tol, "log_det");
  const auto& l = llt.matrixLLT();
  double acc = 0.0;
  for (Index i = 0; i < m.dim(); ++i) acc += std::log(l(i, i));
  return 2.0 * acc;
}

double trace_product(const SymMat& a, const SymMat& b) {
  return a.matrix().cwiseProduct(b.matrix()).sum();
}

}  // namespace tgraph

#pragma once

#include <Eigen/Dense>

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tgraph/errors.hpp"

namespace tgraph {

using Index = Eigen::Index;

/// Default magnitude below which an off-diagonal entry is treated as zero
/// when reading a support. Coordinate descent produces exact zeros; ADMM
/// iterates leave numerical dust of this order.
inline constexpr double kDefaultEdgeTol = 1e-8;

/**
 * Dense symmetric p x p matrix.
 *
 * Symmetry is exact: `from_matrix` rejects anything that is not bitwise
 * symmetric, `symmetrized` averages the two triangles. Instances are
 * immutable after construction.
 */
class SymMat {
 public:
  SymMat() = default;

  static SymMat from_matrix(Eigen::MatrixXd m);
  static SymMat symmetrized(const Eigen::MatrixXd& m);
  static SymMat identity(Index p);
  static SymMat diagonal(const Eigen::VectorXd& d);
  static SymMat zero(Index p);

  Index dim() const noexcept { return m_.rows(); }
  double operator()(Index i, Index j) const { return m_(i, j); }
  const Eigen::MatrixXd& matrix() const noexcept { return m_; }
  Eigen::VectorXd diag() const { return m_.diagonal(); }

  /// Largest |entry| over i != j.
  double max_abs_offdiag() const;

  friend bool operator==(const SymMat& a, const SymMat& b) {
    return a.m_.rows() == b.m_.rows() && a.m_ == b.m_;
  }

 private:
  explicit SymMat(Eigen::MatrixXd m) : m_(std::move(m)) {}
  Eigen::MatrixXd m_;
};

/// n observations (rows) of p variables (columns); entries finite.
class DataMatrix {
 public:
  explicit DataMatrix(Eigen::MatrixXd rows, std::vector<std::string> column_names = {});

  Index n() const noexcept { return x_.rows(); }
  Index p() const noexcept { return x_.cols(); }
  const Eigen::MatrixXd& values() const noexcept { return x_; }
  const std::vector<std::string>& column_names() const noexcept { return names_; }

  /// Subset of rows, in the order given.
  DataMatrix rows(const std::vector<Index>& which) const;

 private:
  Eigen::MatrixXd x_;
  std::vector<std::string> names_;
};

struct Edge {
  int i = 0;
  int j = 0;
  auto operator<=>(const Edge&) const = default;
};

/// Unordered off-diagonal index pairs of a p-node graph, stored as i < j in
/// lexicographic order.
class EdgeSet {
 public:
  explicit EdgeSet(int dim = 0) : dim_(dim) {}
  EdgeSet(int dim, std::vector<Edge> edges);

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return edges_.empty(); }
  bool contains(int i, int j) const;
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  auto begin() const { return edges_.begin(); }
  auto end() const { return edges_.end(); }

  /// Number of unordered pairs p(p-1)/2.
  std::size_t max_edges() const noexcept;
  bool is_subset_of(const EdgeSet& other) const;

  friend bool operator==(const EdgeSet&, const EdgeSet&) = default;

 private:
  int dim_;
  std::vector<Edge> edges_;
};

/// Which normalisation the sample covariance uses.
enum class CovarianceDenominator { kN, kNMinusOne };

SymMat sample_covariance(const DataMatrix& data, bool center = true,
                         CovarianceDenominator denom = CovarianceDenominator::kN);

SymMat to_correlation(const SymMat& cov);

/// Pairs (i, j), i < j, with |m(i, j)| > tol.
EdgeSet edge_set(const SymMat& m, double tol = kDefaultEdgeTol);

struct SymEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns orthonormal
};

SymEigen sym_eigen(const SymMat& m);
double min_eigenvalue(const SymMat& m);

/// Throws NotPositiveDefiniteError unless the smallest eigenvalue exceeds tol.
SymMat spd_inverse(const SymMat& m, double tol = 0.0);
double log_det(const SymMat& m, double tol = 0.0);

/// tr(A B) for symmetric A, B without forming the product.
double trace_product(const SymMat& a, const SymMat& b);

}  // namespace tgraph

#include "simplex.hpp"

#include <fmt/core.h>

#include <cmath>
#include <limits>
#include <vector>

#include "tgraph/errors.hpp"

namespace tgraph::detail {

namespace {

using Eigen::Index;

constexpr double kPivotEps = 1e-11;
constexpr int kDegenerateRunBeforeBland = 50;

class Tableau {
 public:
  Tableau(const Eigen::MatrixXd& a, const Eigen::VectorXd& b)
      : m_(a.rows()), n_(a.cols()) {
    for (Index i = 0; i < m_; ++i) {
      if (b(i) < 0.0) ++n_art_;
    }
    cols_ = n_ + m_ + n_art_;
    t_ = Eigen::MatrixXd::Zero(m_, cols_ + 1);
    basis_.resize(static_cast<std::size_t>(m_));
    Index art = n_ + m_;
    for (Index i = 0; i < m_; ++i) {
      const double sign = b(i) < 0.0 ? -1.0 : 1.0;
      t_.row(i).head(n_) = sign * a.row(i);
      t_(i, n_ + i) = sign;
      t_(i, cols_) = sign * b(i);
      if (b(i) < 0.0) {
        t_(i, art) = 1.0;
        basis_[static_cast<std::size_t>(i)] = art++;
      } else {
        basis_[static_cast<std::size_t>(i)] = n_ + i;
      }
    }
    scale_ = std::max(1.0, t_.cwiseAbs().maxCoeff());
  }

  bool is_artificial(Index j) const { return j >= n_ + m_; }

  // Reduced-cost row for cost vector `cost` (length cols_).
  void price(const Eigen::VectorXd& cost) {
    obj_ = Eigen::VectorXd::Zero(cols_ + 1);
    obj_.head(cols_) = cost;
    for (Index i = 0; i < m_; ++i) {
      const double cb = cost(basis_[static_cast<std::size_t>(i)]);
      if (cb != 0.0) obj_ -= cb * t_.row(i).transpose();
    }
  }

  // Runs simplex iterations on the current reduced-cost row.
  void optimise(bool allow_artificial) {
    int degenerate_run = 0;
    const double eps = kPivotEps * scale_;
    for (;;) {
      const bool bland = degenerate_run > kDegenerateRunBeforeBland;
      Index enter = -1;
      double best = -eps;
      for (Index j = 0; j < cols_; ++j) {
        if (!allow_artificial && is_artificial(j)) continue;
        if (obj_(j) < best) {
          enter = j;
          if (bland) break;
          best = obj_(j);
        }
      }
      if (enter < 0) return;

      Index leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < m_; ++i) {
        const double piv = t_(i, enter);
        if (piv <= eps) continue;
        const double r = t_(i, cols_) / piv;
        if (leave < 0 || r < ratio - eps) {
          leave = i;
          ratio = r;
        } else if (r <= ratio + eps &&
                   basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)]) {
          leave = i;  // tie: smallest basic index leaves
          ratio = std::min(ratio, r);
        }
      }
      if (leave < 0) throw NumericError("simplex: linear program is unbounded");
      degenerate_run = ratio <= eps ? degenerate_run + 1 : 0;
      pivot(leave, enter);
      if (++pivots_ > 50 * (cols_ + m_) + 1000) {
        throw NumericError("simplex: pivot limit exceeded");
      }
    }
  }

  void pivot(Index row, Index col) {
    t_.row(row) /= t_(row, col);
    for (Index i = 0; i < m_; ++i) {
      if (i == row) continue;
      const double f = t_(i, col);
      if (f != 0.0) t_.row(i) -= f * t_.row(row);
    }
    const double f = obj_(col);
    if (f != 0.0) obj_ -= f * t_.row(row).transpose();
    basis_[static_cast<std::size_t>(row)] = col;
  }

  // Pivots zero-level artificials out of the basis where a structural column allows it.
  void expel_artificials() {
    const double eps = kPivotEps * scale_;
    for (Index i = 0; i < m_; ++i) {
      if (!is_artificial(basis_[static_cast<std::size_t>(i)])) continue;
      for (Index j = 0; j < n_ + m_; ++j) {
        if (std::abs(t_(i, j)) > eps) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  double objective_value() const { return -obj_(cols_); }
  Index cols() const { return cols_; }
  Index n_art() const { return n_art_; }
  int pivots() const { return pivots_; }
  double scale() const { return scale_; }

  Eigen::VectorXd primal() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n_);
    for (Index i = 0; i < m_; ++i) {
      const Index j = basis_[static_cast<std::size_t>(i)];
      if (j < n_) x(j) = std::max(0.0, t_(i, cols_));
    }
    return x;
  }

 private:
  Index m_, n_;
  Index n_art_ = 0;
  Index cols_ = 0;
  Eigen::MatrixXd t_;
  Eigen::VectorXd obj_;
  std::vector<Index> basis_;
  double scale_ = 1.0;
  int pivots_ = 0;
};

}  // namespace

LpSolution solve_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
  if (a.rows() != b.size() || a.cols() != c.size()) {
    throw std::invalid_argument("solve_lp: dimension mismatch");
  }
  Tableau tab(a, b);
  const Index n = a.cols();
  const Index m = a.rows();

  if (tab.n_art() > 0) {
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(tab.cols());
    phase1.tail(tab.n_art()).setOnes();
    tab.price(phase1);
    tab.optimise(true);
    if (tab.objective_value() > 1e-9 * tab.scale() * static_cast<double>(m)) {
      throw NumericError(
          fmt::format("simplex: linear program is infeasible (phase-1 value {:.3e})",
                      tab.objective_value()));
    }
    tab.expel_artificials();
  }

  Eigen::VectorXd cost = Eigen::VectorXd::Zero(tab.cols());
  cost.head(n) = c;
  tab.price(cost);
  tab.optimise(false);

  LpSolution sol;
  sol.x = tab.primal();
  sol.objective = c.dot(sol.x);
  sol.pivots = tab.pivots();
  return sol;
}

}  // namespace tgraph::detail

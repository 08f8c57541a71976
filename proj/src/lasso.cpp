#include "tgraph/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace tgraph {

LassoStats gram_lasso_cd(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double penalty,
                         std::span<const Index> coords, Eigen::VectorXd& beta,
                         const LassoOptions& opts) {
  LassoStats stats;
  Eigen::VectorXd grad = a * beta;  // A beta over all rows

  double scale = 0.0;
  for (Index k : coords) scale = std::max(scale, std::abs(b(k)));
  const double stop = opts.tol * std::max(scale, 1e-300);

  // One pass over `which`; returns the largest move in gradient units.
  auto sweep = [&](std::span<const Index> which) {
    double biggest = 0.0;
    for (Index k : which) {
      const double akk = a(k, k);
      if (!(akk > 0.0)) {
        if (beta(k) != 0.0) {
          grad -= a.col(k) * beta(k);
          beta(k) = 0.0;
        }
        continue;
      }
      const double old = beta(k);
      const double partial = b(k) - (grad(k) - akk * old);
      const double fresh = soft_threshold(partial, penalty) / akk;
      const double delta = fresh - old;
      if (delta != 0.0) {
        grad.noalias() += a.col(k) * delta;
        beta(k) = fresh;
        biggest = std::max(biggest, std::abs(delta) * akk);
      }
    }
    return biggest;
  };

  std::vector<Index> active;
  while (stats.iterations < opts.max_iter) {
    ++stats.iterations;
    if (sweep(coords) < stop) {
      stats.converged = true;
      break;
    }
    // Iterate on the current support until it settles, then re-check all.
    active.clear();
    for (Index k : coords) {
      if (beta(k) != 0.0) active.push_back(k);
    }
    while (stats.iterations < opts.max_iter) {
      ++stats.iterations;
      if (sweep(active) < stop) break;
    }
  }
  return stats;
}

}  // namespace tgraph

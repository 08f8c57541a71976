#pragma once

#include <Eigen/Dense>

namespace tgraph::detail {

struct LpSolution {
  Eigen::VectorXd x;
  double objective = 0.0;
  int pivots = 0;
};

// Dense two-phase tableau simplex for
//
//   minimise c'x  subject to  A x <= b,  x >= 0,
//
// with b of either sign. Dantzig pricing, falling back to Bland's rule after
// a run of degenerate pivots so the method cannot cycle. Throws NumericError
// when the program is infeasible or unbounded.
LpSolution solve_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c);

}  // namespace tgraph::detail

#include <doctest.h>

#include "oracles.hpp"
#include "tgraph/clime.hpp"

using namespace tgraph;
using Eigen::MatrixXd;

TEST_CASE("identity covariance") {
  const PrecisionEstimate est = fit_clime(SymMat::identity(10), 0.2);
  CHECK((est.theta.matrix() - 0.8 * MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("lambda of one with unit diagonal gives zero") {
  const SymMat s = oracle::random_correlation(5, 30, 3);
  CHECK(fit_clime(s, 1.0).theta.matrix().isZero(1e-12));
}

TEST_CASE("column objectives match LP vertex enumeration") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SymMat s = oracle::random_spd(3, seed);
    const ClimeFit fit = solve_clime(s, 0.1);
    for (int j = 0; j < 3; ++j) {
      CHECK(fit.column_objective[static_cast<std::size_t>(j)] ==
            doctest::Approx(oracle::clime_column_lp(s.matrix(), j, 0.1)).epsilon(1e-6));
    }
  }
}

TEST_CASE("feasibility, symmetry and the min-magnitude rule") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const SymMat s = oracle::random_correlation(8, 60, seed);
    for (double lambda : {0.05, 0.2}) {
      const ClimeFit fit = solve_clime(s, lambda);
      const MatrixXd resid = s.matrix() * fit.omega_tilde - MatrixXd::Identity(8, 8);
      CHECK(resid.cwiseAbs().maxCoeff() <= lambda + 1e-6);
      CHECK(fit.max_violation <= 1e-6);
      const MatrixXd& t = fit.omega_tilde;
      const MatrixXd& o = fit.estimate.theta.matrix();
      for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) {
          CHECK(o(i, j) == o(j, i));
          const double expect = std::abs(t(i, j)) <= std::abs(t(j, i)) ? t(i, j) : t(j, i);
          if (i != j) CHECK(o(i, j) == expect);
        }
      }
    }
  }
}

TEST_CASE("column objectives do not increase with lambda") {
  const SymMat s = oracle::random_correlation(6, 50, 9);
  std::vector<double> prev;
  for (double lambda : {0.02, 0.05, 0.1, 0.2, 0.5}) {
    const ClimeFit fit = solve_clime(s, lambda);
    if (!prev.empty()) {
      for (std::size_t j = 0; j < prev.size(); ++j) CHECK(fit.column_objective[j] <= prev[j] + 1e-9);
    }
    prev = fit.column_objective;
  }
}

TEST_CASE("invalid input") {
  CHECK_THROWS_AS(fit_clime(SymMat::identity(3), 0.0), std::invalid_argument);
  MatrixXd m = MatrixXd::Identity(3, 3);
  m(1, 1) = 0.0;
  CHECK_THROWS_AS(fit_clime(SymMat::from_matrix(m), 0.1), DegenerateInputError);
}

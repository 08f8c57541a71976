#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tgraph/core.hpp"
#include "tgraph/simulate.hpp"

using namespace tgraph;
using Eigen::MatrixXd;

namespace {

MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
  MatrixXd m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

double max_diff(const MatrixXd& a, const MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("SymMat construction") {
  CHECK_THROWS_AS(SymMat::from_matrix(mat({{1, 2}, {2.5, 1}})), std::invalid_argument);
  CHECK_THROWS_AS(SymMat::from_matrix(MatrixXd::Zero(2, 3)), std::invalid_argument);
  const SymMat s = SymMat::symmetrized(mat({{1, 2}, {3, 1}}));
  CHECK(s(0, 1) == 2.5);
  CHECK(s(1, 0) == 2.5);
  CHECK(s.max_abs_offdiag() == 2.5);
}

TEST_CASE("DataMatrix rejects non-finite entries") {
  CHECK_THROWS_AS(DataMatrix(mat({{1, NAN}, {0, 1}})), DataError);
  CHECK_THROWS_AS(DataMatrix(mat({{1, INFINITY}})), DataError);
}

TEST_CASE("sample_covariance small cases") {
  const SymMat c = sample_covariance(DataMatrix(mat({{1, 0}, {-1, 0}})));
  CHECK(c.matrix() == mat({{1, 0}, {0, 0}}));

  const SymMat z = sample_covariance(DataMatrix(mat({{3, -2, 7}, {3, -2, 7}, {3, -2, 7}})));
  CHECK(z.matrix() == MatrixXd::Zero(3, 3));

  const SymMat raw = sample_covariance(DataMatrix(mat({{1, 2}, {3, 4}})), false);
  CHECK(raw.matrix().isApprox(mat({{5, 7}, {7, 10}})));

  const SymMat unbiased = sample_covariance(DataMatrix(mat({{1, 0}, {-1, 0}})), true,
                                            CovarianceDenominator::kNMinusOne);
  CHECK(unbiased(0, 0) == doctest::Approx(2.0));

  CHECK_THROWS_AS(sample_covariance(DataMatrix(mat({{1, 2}}))), DataError);
}

TEST_CASE("sample_covariance matches a two-pass computation") {
  const DataMatrix x = sample_mvn(SymMat::identity(4), 50, 11);
  const SymMat c = sample_covariance(x);
  CHECK(max_diff(c.matrix(), oracle::two_pass_covariance(x.values())) < 1e-12);
  CHECK(max_diff(c.matrix(), MatrixXd::Identity(4, 4)) < 0.5);

  // Frozen from the two-pass computation on this seed.
  CHECK(c(0, 0) == doctest::Approx(0.98060589964058142).epsilon(1e-12));
  CHECK(c(1, 3) == doctest::Approx(0.30066547995989212).epsilon(1e-12));
}

TEST_CASE("sample_covariance is positive semidefinite") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const int p = 3 + static_cast<int>(seed % 6);
    const Index n = 2 + static_cast<Index>(seed % 9);  // often n < p
    const DataMatrix x = sample_mvn(oracle::random_spd(p, seed), n, seed);
    CHECK(min_eigenvalue(sample_covariance(x)) >= -1e-10);
  }
}

TEST_CASE("to_correlation") {
  CHECK(to_correlation(SymMat::from_matrix(mat({{4, 2}, {2, 1}}))).matrix() == mat({{1, 1}, {1, 1}}));
  CHECK(to_correlation(SymMat::identity(3)).matrix() == MatrixXd::Identity(3, 3));
  CHECK(max_diff(to_correlation(SymMat::from_matrix(mat({{2, -1}, {-1, 2}}))).matrix(),
                 mat({{1, -0.5}, {-0.5, 1}})) < 1e-15);
  CHECK_THROWS_AS(to_correlation(SymMat::from_matrix(mat({{1, 0}, {0, 0}}))), DegenerateInputError);

  const SymMat s = oracle::random_spd(7, 5);
  const SymMat once = to_correlation(s);
  CHECK(max_diff(to_correlation(once).matrix(), once.matrix()) <= 1e-12);
  CHECK(once.diag().isApprox(Eigen::VectorXd::Ones(7)));
}

TEST_CASE("edge_set") {
  CHECK(edge_set(SymMat::identity(2), 0.0).empty());
  const EdgeSet one = edge_set(SymMat::from_matrix(mat({{1, 0.5}, {0.5, 1}})), 0.0);
  CHECK(one.size() == 1);
  CHECK(one.contains(0, 1));
  CHECK(one.contains(1, 0));

  MatrixXd m = MatrixXd::Identity(4, 4);
  m(0, 1) = m(1, 0) = 0.3;
  m(1, 2) = m(2, 1) = -0.05;
  const EdgeSet e = edge_set(SymMat::from_matrix(m), 0.1);
  REQUIRE(e.size() == 1);
  CHECK(e.edges()[0] == Edge{0, 1});

  const SymMat r = oracle::random_spd(6, 2);
  CHECK(edge_set(r, 0.0) == edge_set(SymMat::from_matrix(-r.matrix()), 0.0));
  CHECK(edge_set(r).size() <= edge_set(r).max_edges());
  CHECK_THROWS_AS(edge_set(r, -1.0), std::invalid_argument);
}

TEST_CASE("EdgeSet normalises pairs") {
  const EdgeSet e(4, {{2, 1}, {0, 3}, {1, 2}});
  CHECK(e.size() == 2);
  CHECK(e.edges()[0] == Edge{0, 3});
  CHECK(e.edges()[1] == Edge{1, 2});
  CHECK_THROWS_AS(EdgeSet(3, {{1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(EdgeSet(3, {{0, 3}}), std::invalid_argument);
  CHECK(EdgeSet(3, {{0, 1}}).is_subset_of(EdgeSet(3, {{0, 1}, {1, 2}})));
  CHECK(EdgeSet(5).max_edges() == 10);
}

TEST_CASE("inverse, log determinant and eigendecomposition") {
  CHECK(spd_inverse(SymMat::identity(3)).matrix() == MatrixXd::Identity(3, 3));
  CHECK(log_det(SymMat::identity(3)) == 0.0);

  Eigen::VectorXd d(2);
  d << 2.0, 0.5;
  const SymMat dm = SymMat::diagonal(d);
  CHECK(max_diff(spd_inverse(dm).matrix(), mat({{0.5, 0}, {0, 2}})) < 1e-15);
  CHECK(log_det(dm) == doctest::Approx(0.0).epsilon(1e-15));

  const SymMat a = oracle::random_spd(6, 3);
  CHECK(max_diff(spd_inverse(a).matrix() * a.matrix(), MatrixXd::Identity(6, 6)) < 1e-8);

  for (int p : {5, 20, 50}) {
    const SymMat m = oracle::random_spd(p, static_cast<std::uint64_t>(p));
    const SymEigen es = sym_eigen(m);
    CHECK(max_diff(es.vectors * es.values.asDiagonal() * es.vectors.transpose(), m.matrix()) < 1e-8);
    CHECK(max_diff(es.vectors.transpose() * es.vectors, MatrixXd::Identity(p, p)) < 1e-10);
    for (Index k = 1; k < es.values.size(); ++k) CHECK(es.values(k - 1) <= es.values(k));
    CHECK(log_det(m) == doctest::Approx(es.values.array().log().sum()).epsilon(1e-12));
    CHECK(max_diff(spd_inverse(spd_inverse(m)).matrix(), m.matrix()) < 1e-6);
    const double norm = es.values.cwiseAbs().maxCoeff();
    for (Index k = 0; k < p; ++k) {
      CHECK((m.matrix() * es.vectors.col(k) - es.values(k) * es.vectors.col(k)).norm() <= 1e-9 * norm);
    }
  }
}

TEST_CASE("not positive definite carries the smallest eigenvalue") {
  const SymMat m = SymMat::from_matrix(mat({{1, 2}, {2, 1}}));
  try {
    spd_inverse(m);
    FAIL("expected NotPositiveDefiniteError");
  } catch (const NotPositiveDefiniteError& e) {
    CHECK(e.min_eigenvalue() == doctest::Approx(-1.0));
  }
  CHECK_THROWS_AS(log_det(m), NotPositiveDefiniteError);
}

TEST_CASE("trace_product") {
  const SymMat a = oracle::random_spd(5, 8);
  const SymMat b = oracle::random_spd(5, 9);
  CHECK(trace_product(a, b) == doctest::Approx((a.matrix() * b.matrix()).trace()).epsilon(1e-12));
}

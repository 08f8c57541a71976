#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "oracles.hpp"
#include "tgraph/glasso.hpp"
#include "tgraph/rng.hpp"
#include "tgraph/select.hpp"
#include "tgraph/simulate.hpp"

using namespace tgraph;
using Eigen::MatrixXd;

namespace {

PrecisionEstimate estimate_of(const SymMat& theta) {
  PrecisionEstimate e;
  e.theta = theta;
  return e;
}

// Unit diagonal; off-diagonal entries listed by pair.
PrecisionEstimate base_with(int p, std::initializer_list<std::tuple<int, int, double>> entries) {
  MatrixXd m = MatrixXd::Identity(p, p);
  for (const auto& [i, j, v] : entries) m(i, j) = m(j, i) = v;
  PrecisionEstimate est;
  est.theta = SymMat::from_matrix(m);
  return est;
}

}  // namespace

TEST_CASE("hard_threshold examples") {
  const PrecisionEstimate base = base_with(3, {{0, 1, 0.5}, {1, 2, -0.05}});
  const ThresholdedEstimate zero = hard_threshold(base, 0.0);
  CHECK(zero.theta_tilde == base.theta);
  CHECK(zero.edges == edge_set(base.theta, 0.0));

  const ThresholdedEstimate t = hard_threshold(base, 0.1);
  CHECK(t.theta_tilde(0, 1) == 0.5);
  CHECK(t.theta_tilde(1, 2) == 0.0);
  CHECK(t.edges.size() == 1);

  const ThresholdedEstimate all = hard_threshold(base, 0.5);
  CHECK(all.edges.empty());
  CHECK(all.theta_tilde.diag() == base.theta.diag());

  CHECK_THROWS_AS(hard_threshold(base, -0.1), std::invalid_argument);
}

TEST_CASE("an entry equal to tau is removed") {
  const ThresholdedEstimate t = hard_threshold(base_with(2, {{0, 1, 0.25}}), 0.25);
  CHECK(t.edges.empty());
  CHECK(t.theta_tilde(0, 1) == 0.0);
}

TEST_CASE("threshold_for_edge_count examples") {
  const PrecisionEstimate base = base_with(3, {{0, 1, 0.5}, {0, 2, 0.3}, {1, 2, 0.1}});
  const EdgeCountThreshold two = threshold_for_edge_count(base, 2);
  CHECK(two.tau >= 0.1);
  CHECK(two.tau < 0.3);
  CHECK(two.result.edges == EdgeSet(3, {{0, 1}, {0, 2}}));
  CHECK_FALSE(two.undershoot);

  const EdgeCountThreshold none = threshold_for_edge_count(base, 0);
  CHECK(none.tau == 0.5);
  CHECK(none.result.edges.empty());

  const PrecisionEstimate tied = base_with(3, {{0, 1, 0.3}, {0, 2, -0.3}, {1, 2, 0.1}});
  const EdgeCountThreshold one = threshold_for_edge_count(tied, 1);
  CHECK(one.tau == 0.3);
  CHECK(one.result.edges.empty());
  CHECK(one.undershoot);

  const PrecisionEstimate sparse = base_with(4, {{0, 1, 0.4}});
  const EdgeCountThreshold short_of = threshold_for_edge_count(sparse, 3);
  CHECK(short_of.tau == 0.0);
  CHECK(short_of.shortfall);
  CHECK(short_of.result.edges.size() == 1);

  CHECK_THROWS_AS(threshold_for_edge_count(base, 4), std::invalid_argument);
}

TEST_CASE("threshold algebra on random estimates") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const int p = 3 + static_cast<int>(rng.uniform_int(8));
    MatrixXd m = MatrixXd::Identity(p, p);
    for (int j = 0; j < p; ++j) {
      for (int i = 0; i < j; ++i) {
        // Coarse values so that ties occur.
        const double v = rng.bernoulli(0.3) ? 0.0 : std::round(rng.normal() * 4.0) / 8.0;
        m(i, j) = m(j, i) = v;
      }
    }
    PrecisionEstimate base;
    base.theta = SymMat::from_matrix(m);
    const double t1 = rng.uniform() * 0.5;
    const double t2 = t1 + rng.uniform() * 0.5;
    const ThresholdedEstimate a = hard_threshold(base, t1);
    const ThresholdedEstimate b = hard_threshold(base, t2);
    CHECK(b.edges.is_subset_of(a.edges));
    CHECK(edge_set(a.theta_tilde, 0.0).is_subset_of(edge_set(base.theta, 0.0)));

    const std::size_t k = rng.uniform_int(static_cast<std::uint64_t>(p * (p - 1) / 2 + 1));
    const EdgeCountThreshold c = threshold_for_edge_count(base, k);
    CHECK(c.result.edges.size() <= k);
    CHECK(hard_threshold(estimate_of(c.result.theta_tilde), c.tau).theta_tilde == c.result.theta_tilde);
  }
}

TEST_CASE("default_lambda0") {
  CHECK(default_lambda0(100, 3, 1.0) == doctest::Approx(std::sqrt(std::log(3.0) / 100.0)));
  CHECK(default_lambda0(100, 3, 1.0) == doctest::Approx(0.10482).epsilon(1e-4));
  CHECK(default_lambda0(200, 30, 0.5) == doctest::Approx(default_lambda0(100, 30, 0.5) / std::sqrt(2.0)));
  CHECK(default_lambda0(150, 30) == doctest::Approx(0.0753).epsilon(1e-3));
  CHECK_THROWS_AS(default_lambda0(1, 3), std::invalid_argument);
  CHECK_THROWS_AS(default_lambda0(10, 3, 0.0), std::invalid_argument);
}

TEST_CASE("ebic_score formula") {
  const SymMat s = oracle::random_correlation(5, 60, 1);
  const PrecisionEstimate fit = fit_glasso(s, 0.1);
  const EdgeSet e = edge_set(fit.theta);
  const long n = 60;
  const double loglik = 0.5 * n * (log_det(fit.theta) - (s.matrix() * fit.theta.matrix()).trace());
  CHECK(ebic_score(e, fit.theta, s, n, 0.0) ==
        doctest::Approx(-2.0 * loglik + static_cast<double>(e.size()) * std::log(60.0)));
  CHECK(ebic_score(e, fit.theta, s, n, 0.5) ==
        doctest::Approx(-2.0 * loglik + static_cast<double>(e.size()) * (std::log(60.0) + 2.0 * std::log(5.0))));

  // Empty graph at the diagonal point: log det = -sum log s_ii, tr = p.
  const SymMat d = SymMat::diagonal(s.diag().cwiseInverse());
  const double closed = n * (s.diag().array().log().sum() + 5.0);
  CHECK(ebic_score(EdgeSet(5), d, s, n, 0.5) == doctest::Approx(closed));

  CHECK_THROWS_AS(ebic_score(e, fit.theta, s, n, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(ebic_score(e, SymMat::from_matrix(-fit.theta.matrix()), s, n, 0.5), NotPositiveDefiniteError);
}

TEST_CASE("select_by_ebic") {
  const SymMat s = oracle::random_correlation(6, 80, 2);
  const PrecisionEstimate fit = fit_glasso(s, 0.05);
  const EdgeSet e = edge_set(fit.theta);
  REQUIRE(e.size() >= 2);

  std::vector<EbicCandidate> one{{0.05, 0.0, e, fit.theta}};
  CHECK(select_by_ebic(one, s, 80, 0.5).index == 0);

  // Same likelihood, fewer edges wins.
  const EdgeSet fewer(6, {e.edges()[0]});
  std::vector<EbicCandidate> pair{{0.05, 0.0, e, fit.theta}, {0.05, 0.0, fewer, fit.theta}};
  CHECK(select_by_ebic(pair, s, 80, 0.5).index == 1);

  // Exact ties go to the larger tau, then the larger lambda.
  std::vector<EbicCandidate> ties{{0.05, 0.1, e, fit.theta}, {0.05, 0.2, e, fit.theta}, {0.07, 0.1, e, fit.theta}};
  CHECK(select_by_ebic(ties, s, 80, 0.5).index == 1);
  std::vector<EbicCandidate> lam_ties{{0.05, 0.1, e, fit.theta}, {0.07, 0.1, e, fit.theta}};
  CHECK(select_by_ebic(lam_ties, s, 80, 0.5).index == 1);

  // Order does not matter.
  std::vector<EbicCandidate> grid;
  const std::vector<double> lambdas{0.3, 0.2, 0.1, 0.05, 0.02};
  for (double l : lambdas) {
    const PrecisionEstimate f = fit_glasso(s, l);
    grid.push_back({l, 0.0, edge_set(f.theta), f.theta});
  }
  const double best_lambda = grid[select_by_ebic(grid, s, 80, 0.5).index].lambda;
  std::reverse(grid.begin(), grid.end());
  CHECK(grid[select_by_ebic(grid, s, 80, 0.5).index].lambda == best_lambda);
  std::rotate(grid.begin(), grid.begin() + 2, grid.end());
  CHECK(grid[select_by_ebic(grid, s, 80, 0.5).index].lambda == best_lambda);

  CHECK_THROWS_AS(select_by_ebic(std::vector<EbicCandidate>{}, s, 80, 0.5), std::invalid_argument);
}

TEST_CASE("extra degrees of freedom are penalised") {
  const SymMat s = oracle::random_correlation(5, 60, 7);
  const PrecisionEstimate fit = fit_glasso(s, 0.1);
  const EdgeSet e = edge_set(fit.theta);
  std::vector<EbicCandidate> c{{0.1, 0.0, e, fit.theta, 4}, {0.1, 0.0, e, fit.theta, 0}};
  CHECK(select_by_ebic(c, s, 60, 0.5).index == 1);
}

TEST_CASE("kfold_split partitions the rows") {
  const auto split = kfold_split(23, 5, 9);
  REQUIRE(split.size() == 5);
  std::set<Index> all;
  for (std::size_t f = 0; f < split.size(); ++f) {
    CHECK(split[f].size() == (f < 3 ? 5u : 4u));
    all.insert(split[f].begin(), split[f].end());
  }
  CHECK(all.size() == 23);
  CHECK(kfold_split(23, 5, 9) == split);
  CHECK(kfold_split(23, 5, 10) != split);
  CHECK_THROWS_AS(kfold_split(3, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(kfold_split(10, 1, 1), std::invalid_argument);
}

TEST_CASE("kfold_cv") {
  const SymMat theta = small_world_precision(15, 2, 0.1, 1.0, 3);
  const DataMatrix x = sample_mvn(spd_inverse(theta), 150, 4);
  CvOptions opts;
  opts.seed = 11;
  const std::vector<double> single{0.3};
  CHECK(kfold_cv(x, single, opts) == 0.3);

  std::vector<double> grid;
  for (int k = 0; k < 10; ++k) grid.push_back(0.5 * std::pow(0.7, k));
  const double cv = kfold_cv(x, grid, opts);
  CHECK(cv == doctest::Approx(0.5 * std::pow(0.7, 7)));
  CHECK(kfold_cv(x, grid, opts) == cv);

  // Cross-validation picks a denser fit than EBIC on this fixture.
  const SymMat s = sample_covariance(x);
  std::vector<EbicCandidate> cands;
  for (double l : grid) {
    const PrecisionEstimate f = fit_glasso(s, l);
    cands.push_back({l, 0.0, edge_set(f.theta), f.theta});
  }
  const double ebic = cands[select_by_ebic(cands, s, 150, 0.5).index].lambda;
  CHECK(ebic == doctest::Approx(0.5 * std::pow(0.7, 4)));
  CHECK(cv < ebic);

  CvOptions loo = opts;
  loo.folds = 150;
  const std::vector<double> two{0.1, 0.2};
  CHECK_THROWS_AS(kfold_cv(x, two, loo), std::invalid_argument);
}

TEST_CASE("kfold_cv_select ties go to the later candidate") {
  const DataMatrix x = sample_mvn(SymMat::identity(4), 40, 5);
  const SymMat fixed = SymMat::identity(4);
  const CvResult r = kfold_cv_select(x, 3, 4, 1, [&](const SymMat&, std::size_t) { return fixed; });
  CHECK(r.best_index == 2);
  CHECK(r.scores[0] == r.scores[2]);

  const CvResult failing = kfold_cv_select(x, 2, 4, 1, [&](const SymMat&, std::size_t i) {
    if (i == 1) throw NumericError("no fit");
    return fixed;
  });
  CHECK(failing.best_index == 0);
  CHECK(std::isinf(failing.scores[1]));
}

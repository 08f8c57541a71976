#include "tgraph/select.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "tgraph/glasso.hpp"
#include "tgraph/rng.hpp"

namespace tgraph {

ThresholdedEstimate hard_threshold(const PrecisionEstimate& base, double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument(fmt::format("hard_threshold: tau must be >= 0, got {}", tau));
  const Index p = base.theta.dim();
  Eigen::MatrixXd m = base.theta.matrix();
  std::vector<Edge> edges;
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < j; ++i) {
      if (std::abs(m(i, j)) > tau) {
        edges.push_back({static_cast<int>(i), static_cast<int>(j)});
      } else {
        m(i, j) = 0.0;
        m(j, i) = 0.0;
      }
    }
  }
  ThresholdedEstimate out;
  out.base = base;
  out.tau = tau;
  out.theta_tilde = SymMat::from_matrix(std::move(m));
  out.edges = EdgeSet(static_cast<int>(p), std::move(edges));
  return out;
}

EdgeCountThreshold threshold_for_edge_count(const PrecisionEstimate& base, std::size_t k) {
  const Index p = base.theta.dim();
  const std::size_t max_pairs = p < 2 ? 0 : static_cast<std::size_t>(p * (p - 1) / 2);
  if (k > max_pairs) {
    throw std::invalid_argument(
        fmt::format("threshold_for_edge_count: k = {} exceeds p(p-1)/2 = {}", k, max_pairs));
  }
  std::vector<double> mags;
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < j; ++i) {
      const double v = std::abs(base.theta(i, j));
      if (v > 0.0) mags.push_back(v);
    }
  }
  std::sort(mags.begin(), mags.end(), std::greater<>());

  EdgeCountThreshold out;
  if (k >= mags.size()) {
    out.tau = 0.0;
    out.shortfall = k > mags.size();
  } else {
    // Dropping everything at or below mags[k] keeps the pairs strictly above it;
    // ties with mags[k] that sit at earlier positions go too.
    out.tau = mags[k];
  }
  out.result = hard_threshold(base, out.tau);
  out.undershoot = !out.shortfall && out.result.edges.size() < k;
  return out;
}

double default_lambda0(long n, long p, double c) {
  if (n < 2 || p < 2) throw std::invalid_argument("default_lambda0: need n >= 2 and p >= 2");
  if (!(c > 0.0)) throw std::invalid_argument("default_lambda0: c must be > 0");
  return c * std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n));
}

double ebic_score(const EdgeSet& edges, const SymMat& theta, const SymMat& sigma_hat, long n,
                  double gamma_ebic) {
  return ebic_score(static_cast<double>(edges.size()), theta, sigma_hat, n, gamma_ebic);
}

double ebic_score(double df, const SymMat& theta, const SymMat& sigma_hat, long n, double gamma_ebic) {
  if (theta.dim() != sigma_hat.dim()) throw std::invalid_argument("ebic_score: dimension mismatch");
  if (!(gamma_ebic >= 0.0 && gamma_ebic <= 1.0)) {
    throw std::invalid_argument("ebic_score: gamma_ebic must lie in [0, 1]");
  }
  const double nn = static_cast<double>(n);
  const double loglik = 0.5 * nn * (log_det(theta) - trace_product(sigma_hat, theta));
  return -2.0 * loglik + df * std::log(nn) +
         4.0 * df * gamma_ebic * std::log(static_cast<double>(sigma_hat.dim()));
}

EbicChoice select_by_ebic(std::span<const EbicCandidate> candidates, const SymMat& sigma_hat,
                          long n, double gamma_ebic) {
  if (candidates.empty()) throw std::invalid_argument("select_by_ebic: no candidates");
  EbicChoice best;
  best.score = std::numeric_limits<double>::infinity();
  bool have = false;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    const double df = static_cast<double>(c.edges.size() + c.extra_df);
    const double score = ebic_score(df, c.theta, sigma_hat, n, gamma_ebic);
    bool better = !have || score < best.score;
    if (have && score == best.score) {
      const auto& b = candidates[best.index];
      better = c.tau != b.tau         ? c.tau > b.tau
               : c.lambda != b.lambda ? c.lambda > b.lambda
                                      : c.edges.size() < b.edges.size();
    }
    if (better) {
      best = {i, score};
      have = true;
    }
  }
  return best;
}

std::vector<std::vector<Index>> kfold_split(Index n, int folds, std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("kfold_split: need at least 2 folds");
  if (n < folds) throw std::invalid_argument(fmt::format("kfold_split: {} rows for {} folds", n, folds));
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(seed, stable_hash("kfold"));
  rng.shuffle(order);
  std::vector<std::vector<Index>> out(static_cast<std::size_t>(folds));
  const Index base = n / folds;
  const Index extra = n % folds;
  Index pos = 0;
  for (int f = 0; f < folds; ++f) {
    const Index size = base + (f < extra ? 1 : 0);
    out[static_cast<std::size_t>(f)].assign(order.begin() + pos, order.begin() + pos + size);
    pos += size;
  }
  return out;
}

CvResult kfold_cv_select(const DataMatrix& data, std::size_t n_candidates, int folds,
                         std::uint64_t seed, const CvFitter& fit) {
  if (n_candidates == 0) throw std::invalid_argument("kfold_cv: no candidates");
  const auto split = kfold_split(data.n(), folds, seed);
  for (const auto& f : split) {
    if (f.size() < 2) throw std::invalid_argument("kfold_cv: a fold has fewer than 2 rows");
    if (data.n() - static_cast<Index>(f.size()) < 2) {
      throw std::invalid_argument("kfold_cv: a training split has fewer than 2 rows");
    }
  }
  CvResult res;
  res.scores.assign(n_candidates, 0.0);
  for (std::size_t f = 0; f < split.size(); ++f) {
    std::vector<Index> train;
    for (std::size_t g = 0; g < split.size(); ++g) {
      if (g != f) train.insert(train.end(), split[g].begin(), split[g].end());
    }
    std::sort(train.begin(), train.end());
    std::vector<Index> test = split[f];
    std::sort(test.begin(), test.end());
    const SymMat train_cov = sample_covariance(data.rows(train));
    const SymMat test_cov = sample_covariance(data.rows(test));
    for (std::size_t c = 0; c < n_candidates; ++c) {
      double loss;
      try {
        const SymMat theta = fit(train_cov, c);
        loss = trace_product(test_cov, theta) - log_det(theta);
      } catch (const NumericError&) {
        loss = std::numeric_limits<double>::infinity();
      }
      res.scores[c] += loss / static_cast<double>(split.size());
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < n_candidates; ++c) {
    if (res.scores[c] <= best) {
      best = res.scores[c];
      res.best_index = c;
    }
  }
  if (!std::isfinite(best)) throw NumericError("kfold_cv: every candidate failed to fit");
  return res;
}

double kfold_cv(const DataMatrix& data, std::span<const double> lambdas, const CvOptions& opts) {
  if (lambdas.empty()) throw std::invalid_argument("kfold_cv: no lambdas");
  // Ascending lambda so that ties resolve to the sparser fit.
  std::vector<double> grid(lambdas.begin(), lambdas.end());
  std::sort(grid.begin(), grid.end());
  if (grid.size() == 1) return grid.front();
  CvFitter fitter = [&](const SymMat& cov, std::size_t i) -> SymMat {
    if (opts.estimator == CvEstimator::kGlasso) return fit_glasso(cov, grid[i], opts.glasso).theta;
    const auto lv = fit_lvglasso(cov, grid[i], opts.gamma, opts.lvglasso);
    return SymMat::symmetrized(lv.s_hat.matrix() - lv.l_hat.matrix());
  };
  const auto res = kfold_cv_select(data, grid.size(), opts.folds, opts.seed, fitter);
  return grid[res.best_index];
}

}  // namespace tgraph

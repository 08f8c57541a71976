#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tgraph/core.hpp"
#include "tgraph/estimate.hpp"
#include "tgraph/lvglasso.hpp"

namespace tgraph {

/// A base estimate with its off-diagonal entries hard-thresholded at tau.
struct ThresholdedEstimate {
  PrecisionEstimate base;
  double tau = 0.0;
  SymMat theta_tilde;
  EdgeSet edges;
};

/// Keeps off-diagonal entries with |value| > tau (strictly); the diagonal is untouched.
ThresholdedEstimate hard_threshold(const PrecisionEstimate& base, double tau);

struct EdgeCountThreshold {
  double tau = 0.0;
  ThresholdedEstimate result;
  /// k exceeded the number of nonzero off-diagonal pairs.
  bool shortfall = false;
  /// Magnitude ties forced fewer than k edges.
  bool undershoot = false;
};

/**
 * Smallest tau among {0} and the distinct nonzero off-diagonal magnitudes
 * whose thresholded edge count does not exceed k. Pairs tied in magnitude
 * are kept or dropped together, so the count can fall short of k but never
 * exceeds it.
 */
EdgeCountThreshold threshold_for_edge_count(const PrecisionEstimate& base, std::size_t k);

/// c * sqrt(log p / n).
double default_lambda0(long n, long p, double c = 0.5);

/**
 * Extended BIC for a Gaussian graphical model:
 *
 *   -2 l(theta) + |E| log n + 4 |E| gamma_ebic log p,
 *   l(theta) = (n / 2) (log det theta - tr(S theta)).
 */
double ebic_score(const EdgeSet& edges, const SymMat& theta, const SymMat& sigma_hat, long n,
                  double gamma_ebic);

/// Same criterion with |E| replaced by an arbitrary parameter count.
double ebic_score(double df, const SymMat& theta, const SymMat& sigma_hat, long n, double gamma_ebic);

struct EbicCandidate {
  double lambda = 0.0;
  double tau = 0.0;
  EdgeSet edges;
  /// Positive definite matrix at which the likelihood is evaluated.
  SymMat theta;
  /// Parameters beyond the edges (a low-rank component, say).
  std::size_t extra_df = 0;
};

struct EbicChoice {
  std::size_t index = 0;
  double score = 0.0;
};

/// Argmin of ebic_score; ties go to the larger tau, then the larger lambda,
/// then the smaller edge count.
EbicChoice select_by_ebic(std::span<const EbicCandidate> candidates, const SymMat& sigma_hat,
                          long n, double gamma_ebic);

/// Row indices of each fold: seeded shuffle, then contiguous blocks.
std::vector<std::vector<Index>> kfold_split(Index n, int folds, std::uint64_t seed);

/// Fits candidate `index` on a training covariance; returns a positive definite precision.
using CvFitter = std::function<SymMat(const SymMat& train_cov, std::size_t index)>;

struct CvResult {
  std::size_t best_index = 0;
  /// Mean held-out negative log-likelihood per candidate (+inf if a fit failed).
  std::vector<double> scores;
};

/**
 * K-fold cross-validation over arbitrary candidates. The score of a
 * candidate is tr(S_test Theta_train) - log det Theta_train averaged over
 * folds. Ties go to the later candidate, so order candidates from dense to
 * sparse. Throws std::invalid_argument if a fold has fewer than 2 rows.
 */
CvResult kfold_cv_select(const DataMatrix& data, std::size_t n_candidates, int folds,
                         std::uint64_t seed, const CvFitter& fit);

enum class CvEstimator { kGlasso, kLvglasso };

struct CvOptions {
  int folds = 5;
  std::uint64_t seed = 0;
  CvEstimator estimator = CvEstimator::kGlasso;
  /// Sparsity weight used when estimator is kLvglasso.
  double gamma = 1.0;
  SolverOptions glasso;
  LvglassoOptions lvglasso;
};

/// Cross-validated lambda for the graphical lasso (or the latent model at a
/// fixed gamma). Ties go to the larger lambda.
double kfold_cv(const DataMatrix& data, std::span<const double> lambdas, const CvOptions& opts);

}  // namespace tgraph

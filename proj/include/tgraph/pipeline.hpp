#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tgraph/core.hpp"
#include "tgraph/estimate.hpp"
#include "tgraph/lvglasso.hpp"

namespace tgraph {

enum class Method { kGlasso, kTglasso, kNbsel, kTnbsel, kClime, kTclime, kLvglasso };

enum class TuningMode {
  kOracleCount,
  kEbic,
  kCv,
  /// Fit once at lambda0 and keep every edge (tau = 0).
  kLambda0,
};

std::string_view method_name(Method m);
std::optional<Method> parse_method(std::string_view s);
std::string_view tuning_name(TuningMode m);
std::optional<TuningMode> parse_tuning(std::string_view s);
bool is_thresholded(Method m);

struct TuningConfig {
  TuningMode mode = TuningMode::kOracleCount;
  double lambda0_c = 0.5;
  /// Explicit lambda grid for ebic/cv; empty means a geometric grid from the data.
  std::vector<double> lambda_grid;
  std::size_t lambda_grid_size = 12;
  double lambda_min_ratio = 0.05;
  std::vector<double> gamma_grid{0.5, 1.0, 2.0, 4.0};
  /// Number of edge counts tried when choosing tau by ebic/cv.
  std::size_t edge_grid_size = 40;
  double gamma_ebic = 0.5;
  int folds = 5;
  /// Bisection steps per lambda search under oracle_count.
  int search_steps = 30;
  SolverOptions solver;
  LvglassoOptions lvglasso;
};

struct MethodResult {
  EdgeSet edges;
  /// Estimate whose off-diagonal support is `edges`.
  SymMat estimate;
  double lambda = 0.0;
  std::optional<double> tau;
  std::optional<double> gamma;
  bool converged = true;
};

/**
 * Fits one method on `data` (whose sample covariance is `cov`) and tunes it.
 *
 * oracle_count: glasso, nbsel, clime and lvglasso search lambda for the
 * largest edge count not above `oracle_edges` (lvglasso over each gamma in
 * the grid, keeping the count closest to the target, ties to larger lambda);
 * the thresholded methods fit at lambda0 and threshold to `oracle_edges`.
 *
 * ebic / cv: candidates are scored at a positive definite matrix. glasso
 * uses its own estimate, lvglasso uses S - L with |E(S)| degrees of freedom,
 * every other method uses a glasso refit at lambda0 restricted to the
 * candidate's support.
 *
 * Throws ConfigError when oracle_count is requested without a count.
 */
MethodResult fit_method(Method method, const DataMatrix& data, const SymMat& cov,
                        const TuningConfig& tuning, std::optional<std::size_t> oracle_edges,
                        std::uint64_t cv_seed);

}  // namespace tgraph

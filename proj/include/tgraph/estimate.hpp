#pragma once

#include <optional>
#include <string_view>

#include "tgraph/core.hpp"

namespace tgraph {

enum class EstimateMethod { kGlasso, kClime, kNeighborhood, kLvglassoSparse, kThresholded };

inline std::string_view to_string(EstimateMethod m) {
  switch (m) {
    case EstimateMethod::kGlasso: return "glasso";
    case EstimateMethod::kClime: return "clime";
    case EstimateMethod::kNeighborhood: return "neighborhood";
    case EstimateMethod::kLvglassoSparse: return "lvglasso-sparse-part";
    case EstimateMethod::kThresholded: return "thresholded";
  }
  return "unknown";
}

/// A fitted precision matrix together with how it was obtained.
struct PrecisionEstimate {
  SymMat theta;
  double lambda = 0.0;
  EstimateMethod method = EstimateMethod::kGlasso;
  int iterations = 0;
  bool converged = true;
  std::optional<double> objective;
};

struct SolverOptions {
  int max_iter = 200;
  /// Outer convergence tolerance (relative, solver specific).
  double tol = 1e-6;
  int inner_max_iter = 1000;
  double inner_tol = 1e-9;
};

}  // namespace tgraph

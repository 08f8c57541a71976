#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tgraph/core.hpp"

namespace tgraph {

struct Confusion {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  long tn = 0;
};

/// Counts over all p(p-1)/2 unordered pairs.
Confusion confusion(const EdgeSet& est, const EdgeSet& truth);

/// TP / (TP + (FP + FN) / 2); 1 when TP, FP and FN are all zero.
double f1(const Confusion& c);

/// Off-diagonal signs agree everywhere, where |x| <= tol counts as sign 0.
bool sign_consistency(const SymMat& est, const SymMat& truth, double tol = kDefaultEdgeTol);

/// Fraction of edges joining equally labelled nodes; nullopt for an empty edge set.
std::optional<double> tuning_share(const EdgeSet& edges, const std::vector<std::string>& labels);

}  // namespace tgraph

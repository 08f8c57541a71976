#include "tgraph/metrics.hpp"

#include <fmt/core.h>

#include <cmath>
#include <stdexcept>

namespace tgraph {

Confusion confusion(const EdgeSet& est, const EdgeSet& truth) {
  if (est.dim() != truth.dim()) {
    throw std::invalid_argument(
        fmt::format("confusion: dimension mismatch ({} vs {})", est.dim(), truth.dim()));
  }
  Confusion c;
  for (const Edge& e : est) {
    if (truth.contains(e.i, e.j)) {
      ++c.tp;
    } else {
      ++c.fp;
    }
  }
  c.fn = static_cast<long>(truth.size()) - c.tp;
  c.tn = static_cast<long>(truth.max_edges()) - c.tp - c.fp - c.fn;
  return c;
}

double f1(const Confusion& c) {
  if (c.tp == 0) return c.fp + c.fn == 0 ? 1.0 : 0.0;
  return static_cast<double>(c.tp) / (static_cast<double>(c.tp) + 0.5 * static_cast<double>(c.fp + c.fn));
}

bool sign_consistency(const SymMat& est, const SymMat& truth, double tol) {
  if (est.dim() != truth.dim()) throw std::invalid_argument("sign_consistency: dimension mismatch");
  auto sign = [tol](double x) { return std::abs(x) <= tol ? 0 : (x > 0 ? 1 : -1); };
  for (Index j = 0; j < est.dim(); ++j) {
    for (Index i = 0; i < j; ++i) {
      if (sign(est(i, j)) != sign(truth(i, j))) return false;
    }
  }
  return true;
}

std::optional<double> tuning_share(const EdgeSet& edges, const std::vector<std::string>& labels) {
  if (static_cast<int>(labels.size()) != edges.dim()) {
    throw std::invalid_argument(
        fmt::format("tuning_share: {} labels for {} nodes", labels.size(), edges.dim()));
  }
  if (edges.empty()) return std::nullopt;
  long same = 0;
  for (const Edge& e : edges) {
    if (labels[static_cast<std::size_t>(e.i)] == labels[static_cast<std::size_t>(e.j)]) ++same;
  }
  return static_cast<double>(same) / static_cast<double>(edges.size());
}

}  // namespace tgraph

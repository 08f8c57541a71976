#include "tgraph/simulate.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <stdexcept>

#include "tgraph/rng.hpp"

namespace tgraph {

namespace {

using Eigen::MatrixXd;

SymMat with_uniform_diagonal(MatrixXd off, double c) {
  off.diagonal().setConstant(c);
  return SymMat::from_matrix(std::move(off));
}

double uniform_diagonal_for(const MatrixXd& off, double margin) {
  if (off.rows() == 0) return margin;
  const SymMat m = SymMat::from_matrix(off);
  return std::abs(min_eigenvalue(m)) + margin;
}

struct LatentBlocks {
  MatrixXd oh;
  MatrixXd h;
};

void check_knobs(const LatentKnobs& k) {
  if (k.p_h < 0) throw ConfigError(fmt::format("latent: p_h must be >= 0, got {}", k.p_h));
  for (double f : {k.oh_sparsity, k.h_sparsity}) {
    if (!(f >= 0.0 && f <= 1.0)) throw ConfigError(fmt::format("latent: sparsity {} outside [0, 1]", f));
  }
  if (!(k.margin > 0.0)) throw ConfigError("latent: margin must be > 0");
  if (!std::isfinite(k.oh_magnitude) || !std::isfinite(k.h_offdiag_magnitude) ||
      !std::isfinite(k.observed_shift)) {
    throw ConfigError("latent: knobs must be finite");
  }
  if (k.p_h > 0 && k.h_diag && (!(*k.h_diag > 0.0) || !std::isfinite(*k.h_diag))) {
    throw ConfigError(fmt::format("latent: h_diag must be > 0 when p_h > 0, got {}", *k.h_diag));
  }
}

// First round(fraction * size) entries of a seeded permutation.
std::vector<std::size_t> masked(std::size_t size, double fraction, std::uint64_t seed,
                                std::string_view tag) {
  std::vector<std::size_t> order(size);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed, stable_hash(tag));
  rng.shuffle(order);
  order.resize(static_cast<std::size_t>(std::llround(fraction * static_cast<double>(size))));
  return order;
}

// Expects k.h_diag to be resolved when p_h > 0.
LatentBlocks build_blocks(const SymMat& theta_o, const LatentKnobs& k, std::uint64_t seed) {
  const Index p_o = theta_o.dim();
  const Index p_h = k.p_h;
  LatentBlocks b;
  b.oh = MatrixXd::Constant(p_o, p_h, k.oh_magnitude);
  for (std::size_t idx : masked(static_cast<std::size_t>(p_o * p_h), k.oh_sparsity, seed, "latent-oh")) {
    b.oh(static_cast<Index>(idx) % p_o, static_cast<Index>(idx) / p_o) = 0.0;
  }
  b.h = MatrixXd::Zero(p_h, p_h);
  if (p_h == 0) return b;
  b.h.diagonal().setConstant(*k.h_diag);
  std::vector<std::pair<Index, Index>> pairs;
  for (Index j = 0; j < p_h; ++j) {
    for (Index i = 0; i < j; ++i) pairs.emplace_back(i, j);
  }
  std::vector<bool> zeroed(pairs.size(), false);
  for (std::size_t idx : masked(pairs.size(), k.h_sparsity, seed, "latent-h")) zeroed[idx] = true;
  for (std::size_t t = 0; t < pairs.size(); ++t) {
    if (zeroed[t]) continue;
    const auto [i, j] = pairs[t];
    b.h(i, j) = b.h(j, i) = k.h_offdiag_magnitude;
  }
  return b;
}

MatrixXd assemble(const MatrixXd& obs, const LatentBlocks& b) {
  const Index p_o = obs.rows();
  const Index p_h = b.h.rows();
  MatrixXd full(p_o + p_h, p_o + p_h);
  full.topLeftCorner(p_o, p_o) = obs;
  full.topRightCorner(p_o, p_h) = b.oh;
  full.bottomLeftCorner(p_h, p_o) = b.oh.transpose();
  full.bottomRightCorner(p_h, p_h) = b.h;
  return full;
}

MatrixXd low_rank_part(const LatentBlocks& b) {
  if (b.h.rows() == 0) return MatrixXd::Zero(b.oh.rows(), b.oh.rows());
  const SymMat hinv = spd_inverse(SymMat::from_matrix(b.h));
  const MatrixXd l = b.oh * hinv.matrix() * b.oh.transpose();
  return 0.5 * (l + l.transpose());
}

}  // namespace

SymMat small_world_precision(int p, int k, double beta, double weight, std::uint64_t seed,
                             double margin) {
  if (k < 2 || k % 2 != 0) throw ConfigError(fmt::format("small world: k must be even and >= 2, got {}", k));
  if (k >= p) throw ConfigError(fmt::format("small world: need p > k, got p = {}, k = {}", p, k));
  if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError(fmt::format("small world: beta {} outside [0, 1]", beta));

  std::vector<std::set<int>> adj(static_cast<std::size_t>(p));
  auto link = [&](int a, int b) {
    adj[static_cast<std::size_t>(a)].insert(b);
    adj[static_cast<std::size_t>(b)].insert(a);
  };
  auto unlink = [&](int a, int b) {
    adj[static_cast<std::size_t>(a)].erase(b);
    adj[static_cast<std::size_t>(b)].erase(a);
  };
  for (int i = 0; i < p; ++i) {
    for (int j = 1; j <= k / 2; ++j) link(i, (i + j) % p);
  }

  Rng rng(seed, stable_hash("small-world"));
  for (int j = 1; j <= k / 2; ++j) {
    for (int i = 0; i < p; ++i) {
      const int old = (i + j) % p;
      if (!rng.bernoulli(beta)) continue;
      if (!adj[static_cast<std::size_t>(i)].contains(old)) continue;
      std::vector<int> free;
      for (int u = 0; u < p; ++u) {
        if (u != i && !adj[static_cast<std::size_t>(i)].contains(u)) free.push_back(u);
      }
      if (free.empty()) continue;
      const int target = free[static_cast<std::size_t>(rng.uniform_int(free.size()))];
      unlink(i, old);
      link(i, target);
    }
  }

  MatrixXd off = MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    for (int u : adj[static_cast<std::size_t>(i)]) off(i, u) = weight;
  }
  return with_uniform_diagonal(off, uniform_diagonal_for(off, margin));
}

SymMat chain_precision(int p, double weight, double margin) {
  if (p < 2) throw ConfigError(fmt::format("chain: p must be >= 2, got {}", p));
  MatrixXd off = MatrixXd::Zero(p, p);
  for (int i = 0; i + 1 < p; ++i) off(i, i + 1) = off(i + 1, i) = weight;
  const double c = 2.0 * std::abs(weight) * std::cos(std::numbers::pi / (p + 1)) + margin;
  return with_uniform_diagonal(off, c);
}

SymMat GraphSpec::full_precision() const {
  const Index n = p_o + p_h;
  MatrixXd full(n, n);
  full.topLeftCorner(p_o, p_o) = theta_o.matrix();
  if (p_h > 0) {
    full.topRightCorner(p_o, p_h) = theta_oh;
    full.bottomLeftCorner(p_h, p_o) = theta_oh.transpose();
    full.bottomRightCorner(p_h, p_h) = theta_h.matrix();
  }
  return SymMat::from_matrix(std::move(full));
}

SymMat GraphSpec::latent_part() const {
  return SymMat::from_matrix(low_rank_part({theta_oh, p_h > 0 ? theta_h.matrix() : MatrixXd()}));
}

SymMat marginal_precision(const GraphSpec& spec) {
  return SymMat::symmetrized(spec.theta_o.matrix() - spec.latent_part().matrix());
}

EtaValue compute_eta(const SymMat& s, const SymMat& l) {
  const SymMat sinv = spd_inverse(s);
  const SymMat marg_inv = spd_inverse(SymMat::symmetrized(s.matrix() - l.matrix()));
  EtaValue out;
  if (s.dim() == 0) return out;
  out.direct = (marg_inv.matrix() - sinv.matrix()).cwiseAbs().maxCoeff();
  out.product_form = (marg_inv.matrix() * l.matrix() * sinv.matrix()).cwiseAbs().maxCoeff();
  return out;
}

double calibrate_h_diag(const SymMat& theta_o, const LatentKnobs& knobs, std::uint64_t seed) {
  LatentKnobs k = knobs;
  k.h_diag = 1.0;
  check_knobs(k);
  if (k.p_h == 0) return 1.0;
  MatrixXd obs = theta_o.matrix();
  obs.diagonal().array() += k.observed_shift;
  LatentBlocks b = build_blocks(theta_o, k, seed);
  const MatrixXd offdiag_h = b.h - MatrixXd(b.h.diagonal().asDiagonal());
  const double target = 0.5 * k.margin;
  // Raising h adds a PSD term to the full matrix, so its smallest
  // eigenvalue is nondecreasing in h and bisection applies.
  auto ok = [&](double h) {
    b.h = offdiag_h;
    b.h.diagonal().setConstant(h);
    return min_eigenvalue(SymMat::symmetrized(assemble(obs, b))) >= target;
  };
  double hi = std::max(1.0, theta_o.diag().mean());
  int grow = 0;
  while (!ok(hi)) {
    if (++grow > 60) return theta_o.diag().mean();  // observed block itself too weak
    hi *= 2.0;
  }
  double lo = 0.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

GraphSpec latent_spec(const SymMat& theta_o, const LatentKnobs& knobs_in, std::uint64_t seed) {
  check_knobs(knobs_in);
  LatentKnobs knobs = knobs_in;
  if (knobs.p_h > 0 && !knobs.h_diag) knobs.h_diag = calibrate_h_diag(theta_o, knobs, seed);
  const Index p_o = theta_o.dim();
  LatentBlocks b = build_blocks(theta_o, knobs, seed);
  MatrixXd obs = theta_o.matrix();
  obs.diagonal().array() += knobs.observed_shift;

  GraphSpec spec;
  spec.p_o = static_cast<int>(p_o);
  spec.p_h = knobs.p_h;
  spec.knobs = knobs;
  spec.seed = seed;
  spec.theta_o = SymMat::from_matrix(obs);
  spec.theta_oh = b.oh;
  spec.theta_h = SymMat::from_matrix(b.h);

  double lo = min_eigenvalue(spec.full_precision());
  if (lo <= 0.0) {
    const double shift = -lo + knobs.margin;
    obs.diagonal().array() += shift;
    b.h.diagonal().array() += shift;
    spec.theta_o = SymMat::from_matrix(obs);
    spec.theta_h = SymMat::from_matrix(b.h);
    spec.diagnostics.diag_shift = shift;
  }

  const SymMat l = spec.latent_part();
  spec.sigma_o = spd_inverse(marginal_precision(spec));
  const EtaValue eta = compute_eta(spec.theta_o, l);
  spec.eta = eta.direct;

  auto& d = spec.diagnostics;
  d.eta_product_form = eta.product_form;
  const SymEigen eo = sym_eigen(spec.theta_o);
  d.theta_o_min_eig = eo.values(0);
  d.theta_o_max_eig = eo.values(eo.values.size() - 1);
  const SymEigen ef = sym_eigen(spec.full_precision());
  d.full_min_eig = ef.values(0);
  d.full_max_eig = ef.values(ef.values.size() - 1);
  const EdgeSet edges = spec.true_edges();
  d.edge_count = edges.size();
  std::vector<int> degree(static_cast<std::size_t>(p_o), 0);
  d.theta_min = 0.0;
  for (const Edge& e : edges) {
    ++degree[static_cast<std::size_t>(e.i)];
    ++degree[static_cast<std::size_t>(e.j)];
    const double v = std::abs(spec.theta_o(e.i, e.j));
    d.theta_min = d.theta_min == 0.0 ? v : std::min(d.theta_min, v);
  }
  d.max_degree = degree.empty() ? 0 : *std::max_element(degree.begin(), degree.end());
  if (p_o > 0) {
    const SymEigen el = sym_eigen(l);
    const double cut = 1e-9 * std::max(1.0, el.values.cwiseAbs().maxCoeff());
    d.latent_rank = static_cast<int>((el.values.array() > cut).count());
  }
  return spec;
}

double calibrate_observed_shift(const SymMat& theta_o, std::span<const LatentKnobs> settings,
                                std::uint64_t seed) {
  double shift = 0.0;
  for (LatentKnobs k : settings) {
    check_knobs(k);
    if (k.p_h > 0 && !k.h_diag) k.h_diag = calibrate_h_diag(theta_o, k, seed);
    const MatrixXd l = low_rank_part(build_blocks(theta_o, k, seed));
    const double lo = min_eigenvalue(SymMat::symmetrized(theta_o.matrix() - l));
    shift = std::max(shift, k.margin - lo);
  }
  return shift;
}

DataMatrix sample_mvn(const SymMat& sigma, Index n, std::uint64_t seed, std::uint64_t stream) {
  if (n < 1) throw std::invalid_argument(fmt::format("sample_mvn: n must be >= 1, got {}", n));
  const Index p = sigma.dim();
  Eigen::LLT<MatrixXd> llt(sigma.matrix());
  if (llt.info() != Eigen::Success) {
    const double lo = min_eigenvalue(sigma);
    throw NotPositiveDefiniteError(
        fmt::format("sample_mvn: covariance not positive definite (min eigenvalue {:.3e})", lo), lo);
  }
  Rng rng(seed, stream);
  MatrixXd z(n, p);
  for (Index r = 0; r < n; ++r) {
    for (Index c = 0; c < p; ++c) z(r, c) = rng.normal();
  }
  MatrixXd x = z * llt.matrixL().transpose();
  return DataMatrix(std::move(x));
}

}  // namespace tgraph

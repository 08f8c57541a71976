#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>

#include "tgraph/core.hpp"

namespace tgraph {

/// Watts-Strogatz graph on p nodes as a precision matrix: off-diagonal
/// entries equal `weight` on edges, uniform diagonal |lambda_min(off part)| + margin.
/// Rewiring moves one endpoint of an edge, so the edge count stays p * k / 2.
SymMat small_world_precision(int p, int k, double beta, double weight, std::uint64_t seed,
                             double margin = 0.1);

/// Path graph 0-1-...-(p-1); diagonal 2 |weight| cos(pi / (p + 1)) + margin.
SymMat chain_precision(int p, double weight, double margin = 0.1);

struct LatentKnobs {
  int p_h = 0;
  double oh_magnitude = 0.2;
  /// Hidden-block diagonal; unset means calibrate_h_diag.
  std::optional<double> h_diag;
  /// Fraction of observed-hidden entries forced to zero.
  double oh_sparsity = 0.0;
  /// Fraction of hidden-hidden off-diagonal entries forced to zero.
  double h_sparsity = 1.0;
  double h_offdiag_magnitude = 0.0;
  /// Added to the observed diagonal before anything else (see calibrate_observed_shift).
  double observed_shift = 0.0;
  double margin = 0.1;
};

struct SpecDiagnostics {
  double theta_o_min_eig = 0.0;
  double theta_o_max_eig = 0.0;
  double full_min_eig = 0.0;
  double full_max_eig = 0.0;
  int max_degree = 0;
  std::size_t edge_count = 0;
  /// Smallest |off-diagonal| over true edges (0 when there are none).
  double theta_min = 0.0;
  int latent_rank = 0;
  /// Uniform raise applied to the full diagonal to restore positive definiteness.
  double diag_shift = 0.0;
  /// eta recomputed as max |(S - L)^-1 L S^-1|.
  double eta_product_form = 0.0;
};

struct GraphSpec {
  int p_o = 0;
  int p_h = 0;
  SymMat theta_o;
  Eigen::MatrixXd theta_oh;
  SymMat theta_h;
  SymMat sigma_o;
  double eta = 0.0;
  LatentKnobs knobs;
  std::uint64_t seed = 0;
  SpecDiagnostics diagnostics;

  /// Support of theta_o.
  EdgeSet true_edges() const { return edge_set(theta_o, 0.0); }
  SymMat full_precision() const;
  /// theta_oh theta_h^-1 theta_ho (zero when p_h == 0).
  SymMat latent_part() const;
};

/**
 * Augments theta_o with p_h hidden variables. The observed-hidden block is
 * oh_magnitude everywhere except a seeded oh_sparsity fraction; the hidden
 * block has diagonal h_diag and off-diagonals h_offdiag_magnitude outside a
 * seeded h_sparsity fraction. Masks come from one fixed permutation per seed,
 * so a larger sparsity zeroes a superset. If the full matrix is not positive
 * definite its whole diagonal is raised by the deficit plus margin.
 *
 * Throws ConfigError for p_h > 0 with h_diag <= 0 or fractions outside [0, 1].
 */
GraphSpec latent_spec(const SymMat& theta_o, const LatentKnobs& knobs, std::uint64_t seed);

/**
 * Smallest hidden-block diagonal for which the full precision matrix has
 * smallest eigenvalue at least margin / 2, all other knobs as given. Falls
 * back to the mean observed diagonal when no hidden diagonal suffices.
 */
double calibrate_h_diag(const SymMat& theta_o, const LatentKnobs& knobs, std::uint64_t seed);

/// Smallest observed-diagonal shift keeping theta_o - L positive definite
/// (with the knob margin) for every knob setting in `settings`. Using one
/// shift across a sweep keeps S fixed while the latent part varies.
double calibrate_observed_shift(const SymMat& theta_o, std::span<const LatentKnobs> settings,
                                std::uint64_t seed);

/// theta_o - theta_oh theta_h^-1 theta_ho.
SymMat marginal_precision(const GraphSpec& spec);

struct EtaValue {
  /// max |(S - L)^-1 - S^-1|
  double direct = 0.0;
  /// max |(S - L)^-1 L S^-1|
  double product_form = 0.0;
};

EtaValue compute_eta(const SymMat& s, const SymMat& l);

/// n draws from N(0, sigma) via the lower Cholesky factor; rows are filled
/// in order, each row's normals drawn left to right.
DataMatrix sample_mvn(const SymMat& sigma, Index n, std::uint64_t seed, std::uint64_t stream = 0);

}  // namespace tgraph

#include "fixtures.hpp"

namespace fixture {

CaseStudy case_study() {
  CaseStudy f;
  f.labels = {"east", "east", "east", "east", "north", "north", "north", "west", "west", "west"};
  Eigen::MatrixXd off = Eigen::MatrixXd::Zero(10, 10);
  for (int i = 0; i < 10; ++i) {
    for (int j = i + 1; j < 10; ++j) {
      if (f.labels[static_cast<std::size_t>(i)] == f.labels[static_cast<std::size_t>(j)]) off(i, j) = off(j, i) = 0.5;
    }
  }
  off(3, 4) = off(4, 3) = 0.5;
  off(6, 7) = off(7, 6) = -0.5;
  const double c = -tgraph::min_eigenvalue(tgraph::SymMat::from_matrix(off)) + 0.3;
  off.diagonal().setConstant(c);
  tgraph::LatentKnobs k;
  k.p_h = 1;
  k.oh_magnitude = 0.3;
  k.h_diag = 4.0;
  f.spec = tgraph::latent_spec(tgraph::SymMat::from_matrix(off), k, 2025);
  f.data = tgraph::sample_mvn(f.spec.sigma_o, 200, 2025, 1);
  return f;
}

}  // namespace fixture

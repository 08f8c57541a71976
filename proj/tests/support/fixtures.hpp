#pragma once

#include <string>
#include <vector>

#include "tgraph/core.hpp"
#include "tgraph/simulate.hpp"

namespace fixture {

/// Ten nodes in three label classes, dense within a class and sparse
/// across, with one weak hidden variable; 200 seeded rows.
struct CaseStudy {
  tgraph::GraphSpec spec;
  tgraph::DataMatrix data{Eigen::MatrixXd::Zero(1, 1)};
  std::vector<std::string> labels;
};

CaseStudy case_study();

}  // namespace fixture

#pragma once

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tgraph/experiment.hpp"

namespace tgraph {

struct CaseStudyMethod {
  MethodSpec spec;
  MethodResult result;
  /// Share of edges joining same-label nodes; unset without labels or edges.
  std::optional<double> tuning_share;
  std::string export_path;
};

struct CaseStudyResult {
  long n = 0;
  int p = 0;
  double lambda0 = 0.0;
  bool has_labels = false;
  std::vector<CaseStudyMethod> methods;
};

/**
 * Tuning used when a method label carries no "-<mode>" suffix: fixed
 * lambda0 for glasso, nbsel and clime; ebic for lvglasso and, unless a
 * fixed edge count is given, for the thresholded estimators.
 */
MethodSpec case_study_method(MethodSpec spec, std::optional<std::size_t> edge_count);

/// Fits every method on `data` without touching the filesystem.
CaseStudyResult analyze_case_study(const DataMatrix& data, const std::vector<std::string>* labels,
                                   const std::vector<MethodSpec>& methods, const TuningConfig& tuning,
                                   bool correlation, std::optional<std::size_t> edge_count);

nlohmann::json case_study_summary_json(const CaseStudyResult& result, const std::string& data_path);

/// Loads the configured data (and labels), fits, writes <out>/<method>.graph.json and <out>/summary.json.
CaseStudyResult run_case_study(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace tgraph

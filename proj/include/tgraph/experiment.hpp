#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tgraph/pipeline.hpp"
#include "tgraph/simulate.hpp"

namespace tgraph {

enum class Design {
  kNoLatentVaryN,
  kNoLatentVaryP,
  kLatentBase,
  kLatentKnobSweep,
  kLatentHighdim,
  kDataDrivenTuning,
  kCaseStudy,
};

std::string_view design_name(Design d);

struct GraphConfig {
  std::string kind = "small_world";  // or "chain"
  int p_o = 30;
  int k = 2;
  double beta = 0.1;
  double weight = 1.0;
  double margin = 0.1;
};

struct LatentConfig {
  int p_h = 0;
  double oh_magnitude = 0.2;
  std::optional<double> h_diag;
  double oh_sparsity = 0.0;
  double h_sparsity = 1.0;
  double h_offdiag_magnitude = 0.0;
};

struct SweepConfig {
  std::string knob;
  std::vector<double> values;
  /// Replaces `values` under --full when non-empty.
  std::vector<double> full_values;
};

struct MethodSpec {
  std::string label;
  Method method = Method::kGlasso;
  TuningMode mode = TuningMode::kOracleCount;
  /// The label carried a "-<mode>" suffix.
  bool explicit_mode = false;
};

struct OutputConfig {
  std::string dir = "results";
  std::string results = "results";
  std::string resolved_config = "resolved_config.json";
};

struct CaseStudyConfig {
  std::string data;
  std::string labels;
  /// Fit on the sample correlation rather than the covariance.
  bool correlation = true;
  /// Fixed edge count for the thresholded estimator instead of ebic.
  std::optional<std::size_t> edge_count;
};

struct ExperimentConfig {
  Design design = Design::kLatentBase;
  GraphConfig graph;
  LatentConfig latent;
  std::optional<SweepConfig> sweep;
  std::vector<long> sample_sizes;
  std::vector<MethodSpec> methods;
  TuningConfig tuning;
  int replicates = 1;
  std::optional<int> replicates_full;
  std::uint64_t base_seed = 1;
  OutputConfig output;
  std::optional<CaseStudyConfig> case_study;
};

/// Strict parse: unknown keys, wrong types and out-of-range values throw ConfigError.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Every field with defaults filled in, plus the generator identity.
nlohmann::json resolved_config_json(const ExperimentConfig& cfg);

struct RunOptions {
  int threads = 1;
  bool timing = false;
  bool full = false;
};

struct ResultRecord {
  std::string design;
  std::string method;
  std::optional<double> knob_value;
  long n = 0;
  int p_o = 0;
  int p_h = 0;
  int replicate = 0;
  std::uint64_t seed = 0;
  double eta = 0.0;
  std::optional<double> lambda;
  std::optional<double> tau;
  std::optional<double> gamma;
  std::size_t edges_selected = 0;
  long tp = 0;
  long fp = 0;
  long fn = 0;
  double f1 = 0.0;
  std::optional<double> runtime_ms;
  bool converged = false;
};

/// Seed of replicate r: base_seed + r.
std::uint64_t replicate_seed(const ExperimentConfig& cfg, int replicate);

/// Ground truth for one (knob value, replicate) of a simulation design.
GraphSpec build_spec(const ExperimentConfig& cfg, std::optional<double> knob_value, int replicate,
                     bool full = false);

/**
 * Runs every setting x replicate x method. Solver failures become rows with
 * converged = false and no edges; invalid configs throw before any work.
 * Records come back sorted, so the thread count never changes the output.
 */
std::vector<ResultRecord> run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

std::string records_csv(const std::vector<ResultRecord>& records);
nlohmann::json records_json(const std::vector<ResultRecord>& records);

}  // namespace tgraph

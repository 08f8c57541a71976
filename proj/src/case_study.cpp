#include "tgraph/case_study.hpp"

#include <fmt/core.h>

#include "tgraph/io.hpp"
#include "tgraph/metrics.hpp"
#include "tgraph/rng.hpp"
#include "tgraph/select.hpp"

namespace tgraph {

MethodSpec case_study_method(MethodSpec spec, std::optional<std::size_t> edge_count) {
  if (spec.explicit_mode) return spec;
  if (is_thresholded(spec.method)) {
    spec.mode = edge_count ? TuningMode::kOracleCount : TuningMode::kEbic;
  } else if (spec.method == Method::kLvglasso) {
    spec.mode = TuningMode::kEbic;
  } else {
    spec.mode = TuningMode::kLambda0;
  }
  return spec;
}

CaseStudyResult analyze_case_study(const DataMatrix& data, const std::vector<std::string>* labels,
                                   const std::vector<MethodSpec>& methods, const TuningConfig& tuning,
                                   bool correlation, std::optional<std::size_t> edge_count) {
  if (labels != nullptr && static_cast<Index>(labels->size()) != data.p()) {
    throw DataError(fmt::format("case study: {} labels for {} variables", labels->size(), data.p()));
  }
  const SymMat cov = correlation ? to_correlation(sample_covariance(data)) : sample_covariance(data);
  CaseStudyResult out;
  out.n = static_cast<long>(data.n());
  out.p = static_cast<int>(data.p());
  out.lambda0 = default_lambda0(out.n, out.p, tuning.lambda0_c);
  out.has_labels = labels != nullptr;
  for (const MethodSpec& given : methods) {
    CaseStudyMethod m;
    m.spec = case_study_method(given, edge_count);
    TuningConfig t = tuning;
    t.mode = m.spec.mode;
    m.result = fit_method(m.spec.method, data, cov, t, edge_count, mix64(stable_hash("case-study-cv")));
    if (labels != nullptr) m.tuning_share = tuning_share(m.result.edges, *labels);
    out.methods.push_back(std::move(m));
  }
  return out;
}

nlohmann::json case_study_summary_json(const CaseStudyResult& r, const std::string& data_path) {
  using nlohmann::json;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json doc;
  doc["data"] = data_path;
  doc["n"] = r.n;
  doc["p"] = r.p;
  doc["lambda0"] = r.lambda0;
  doc["rng"] = std::string(Rng::kName);
  if (r.has_labels) doc["tuning_share_denominator"] = "all estimated edges";
  doc["methods"] = json::array();
  for (const auto& m : r.methods) {
    json entry{{"method", m.spec.label},
               {"tuning", std::string(tuning_name(m.spec.mode))},
               {"lambda", m.result.lambda},
               {"tau", opt(m.result.tau)},
               {"gamma", opt(m.result.gamma)},
               {"edges", m.result.edges.size()},
               {"converged", m.result.converged},
               {"export", m.export_path}};
    if (r.has_labels) entry["tuning_share"] = opt(m.tuning_share);
    doc["methods"].push_back(std::move(entry));
  }
  return doc;
}

CaseStudyResult run_case_study(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  if (!cfg.case_study) throw ConfigError("case study: config has no 'case_study' section");
  const CaseStudyConfig& cs = *cfg.case_study;
  const DataMatrix data = load_matrix_csv(cs.data);
  std::optional<std::vector<std::string>> labels;
  if (!cs.labels.empty()) labels = load_labels(cs.labels);
  CaseStudyResult result =
      analyze_case_study(data, labels ? &*labels : nullptr, cfg.methods, cfg.tuning, cs.correlation, cs.edge_count);
  for (auto& m : result.methods) {
    const auto path = out_dir / fmt::format("{}.graph.json", m.spec.label);
    export_graph(m.result.edges, m.result.estimate, labels ? &*labels : nullptr, path);
    m.export_path = path.filename().string();
  }
  write_text(out_dir / "summary.json", case_study_summary_json(result, cs.data).dump(2) + "\n");
  return result;
}

}  // namespace tgraph

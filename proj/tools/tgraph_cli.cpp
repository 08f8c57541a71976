#include <CLI11.hpp>
#include <fmt/core.h>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "tgraph/case_study.hpp"
#include "tgraph/experiment.hpp"
#include "tgraph/io.hpp"
#include "tgraph/metrics.hpp"

namespace fs = std::filesystem;
using namespace tgraph;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string format = "csv";
  bool timing = false;
  bool full = false;
};

ExperimentConfig load_with_overrides(const Common& c) {
  ExperimentConfig cfg = load_config(c.config);
  if (c.seed) cfg.base_seed = *c.seed;
  return cfg;
}

int cmd_simulate(const Common& c, std::optional<double> knob) {
  const ExperimentConfig cfg = load_with_overrides(c);
  if (cfg.design == Design::kCaseStudy) throw ConfigError("simulate needs a simulation design");
  if (!knob && cfg.sweep) knob = cfg.sweep->values.front();
  const GraphSpec spec = build_spec(cfg, knob, 0);
  const std::string text = spec_json(spec).dump(2) + "\n";
  if (c.out.empty()) {
    std::cout << text;
  } else {
    write_text(fs::path(c.out) / "spec.json", text);
  }
  return 0;
}

int cmd_run(const Common& c) {
  const ExperimentConfig cfg = load_with_overrides(c);
  const fs::path dir = c.out.empty() ? fs::path(cfg.output.dir) : fs::path(c.out);
  if (cfg.design == Design::kCaseStudy) {
    run_case_study(cfg, dir);
    write_text(dir / cfg.output.resolved_config, resolved_config_json(cfg).dump(2) + "\n");
    return 0;
  }
  RunOptions opts;
  opts.threads = c.threads;
  opts.timing = c.timing;
  opts.full = c.full;
  const auto records = run_experiment(cfg, opts);
  if (c.format == "json") {
    write_text(dir / (cfg.output.results + ".json"), records_json(records).dump(2) + "\n");
  } else {
    write_text(dir / (cfg.output.results + ".csv"), records_csv(records));
  }
  nlohmann::json resolved = resolved_config_json(cfg);
  resolved["run"] = {{"threads", opts.threads}, {"timing", opts.timing}, {"full", opts.full}};
  write_text(dir / cfg.output.resolved_config, resolved.dump(2) + "\n");
  fmt::print("{} records written to {}\n", records.size(), dir.string());
  return 0;
}

int cmd_case_study(const Common& c, const std::string& data, const std::string& labels,
                   std::optional<std::size_t> edge_count) {
  ExperimentConfig cfg;
  if (!c.config.empty()) {
    cfg = load_with_overrides(c);
  } else {
    cfg.design = Design::kCaseStudy;
    for (const char* m : {"glasso", "tglasso", "lvglasso"}) {
      cfg.methods.push_back({m, *parse_method(m), TuningMode::kOracleCount, false});
    }
    cfg.case_study = CaseStudyConfig{};
  }
  if (!cfg.case_study) throw ConfigError("case-study: config has no 'case_study' section");
  if (!data.empty()) cfg.case_study->data = data;
  if (!labels.empty()) cfg.case_study->labels = labels;
  if (edge_count) cfg.case_study->edge_count = edge_count;
  if (cfg.case_study->data.empty()) throw ConfigError("case-study: no data file given");
  const fs::path dir = c.out.empty() ? fs::path(cfg.output.dir) : fs::path(c.out);
  const CaseStudyResult r = run_case_study(cfg, dir);
  for (const auto& m : r.methods) {
    fmt::print("{:<10} edges {:>5}", m.spec.label, m.result.edges.size());
    if (r.has_labels) fmt::print("  tuning share {}", m.tuning_share ? fmt::format("{:.4f}", *m.tuning_share) : "NA");
    fmt::print("\n");
  }
  return 0;
}

EdgeSet read_edges(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(fmt::format("{}: {}", path, e.what()));
  }
  if (doc.contains("theta_o")) {
    const auto rows = doc.at("theta_o").get<std::vector<std::vector<double>>>();
    Eigen::MatrixXd m(static_cast<Index>(rows.size()), static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.size()) throw DataError(fmt::format("{}: theta_o is not square", path));
      for (std::size_t j = 0; j < rows.size(); ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
    return edge_set(SymMat::from_matrix(m), 0.0);
  }
  return parse_graph_json(doc).edges;
}

int cmd_score(const Common& c, const std::string& estimate, const std::string& truth) {
  const EdgeSet est = read_edges(estimate);
  const EdgeSet tru = read_edges(truth);
  if (est.dim() != tru.dim()) {
    throw DataError(fmt::format("score: estimate has {} nodes, truth has {}", est.dim(), tru.dim()));
  }
  const Confusion k = confusion(est, tru);
  const double f = f1(k);
  std::string text;
  if (c.format == "json") {
    text = nlohmann::json{{"tp", k.tp}, {"fp", k.fp}, {"fn", k.fn}, {"tn", k.tn}, {"f1", f}}.dump(2) + "\n";
  } else {
    text = fmt::format("tp,fp,fn,tn,f1\n{},{},{},{},{:.17g}\n", k.tp, k.fp, k.fn, k.tn, f);
  }
  if (c.out.empty()) {
    std::cout << text;
  } else {
    write_text(fs::path(c.out) / (c.format == "json" ? "score.json" : "score.csv"), text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thresholded graphical model estimation and simulation studies"};
  app.require_subcommand(1);
  Common c;
  auto common = [&c](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", c.config, "Experiment config (JSON)");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--out", c.out, "Output directory");
    sub->add_option("--seed", c.seed, "Override base_seed");
    sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* simulate = app.add_subcommand("simulate", "Emit the ground-truth spec of replicate 0 as JSON");
  common(simulate, true);
  std::optional<double> knob;
  simulate->add_option("--knob", knob, "Sweep value to build (default: first)");

  auto* run = app.add_subcommand("run", "Run a simulation study from a config");
  common(run, true);
  run->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--timing", c.timing, "Record wall-clock runtime per fit");
  run->add_flag("--full", c.full, "Use full-scale sweep values and replicates");

  auto* case_study = app.add_subcommand("case-study", "Fit and export graphs for a data matrix");
  common(case_study, false);
  std::string data, labels;
  std::optional<std::size_t> edge_count;
  case_study->add_option("--data", data, "CSV data matrix (rows = observations)");
  case_study->add_option("--labels", labels, "One label per variable, one per line");
  case_study->add_option("--edges", edge_count, "Fixed edge count for thresholded estimators");

  auto* score = app.add_subcommand("score", "Score an edge list against a truth");
  common(score, false);
  std::string estimate, truth;
  score->add_option("--estimate", estimate, "Graph JSON")->required()->check(CLI::ExistingFile);
  score->add_option("--truth", truth, "Graph JSON or spec JSON")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*simulate) return cmd_simulate(c, knob);
    if (*run) return cmd_run(c);
    if (*case_study) return cmd_case_study(c, data, labels, edge_count);
    if (*score) return cmd_score(c, estimate, truth);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const DataError& e) {
    fmt::print(stderr, "data error: {}\n", e.what());
    return kExitData;
  } catch (const NumericError& e) {
    fmt::print(stderr, "numeric error: {}\n", e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    fmt::print(stderr, "internal error: {}\n", e.what());
    return kExitNumeric;
  }
  return 0;
}

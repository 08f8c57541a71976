#include <doctest.h>

#include <sstream>

#include "tgraph/experiment.hpp"
#include "tgraph/metrics.hpp"

using namespace tgraph;
using nlohmann::json;

namespace {

json small_config() {
  return json::parse(R"({
    "design": "latent_base",
    "graph": {"kind": "small_world", "p_o": 12, "k": 2, "beta": 0.1, "weight": 1.0},
    "latent": {"p_h": 3, "oh_magnitude": 0.2},
    "sample_sizes": [60, 120],
    "methods": ["glasso", "tglasso", "lvglasso"],
    "tuning": {"mode": "oracle_count", "grids": {"gamma": [0.5, 2]}},
    "replicates": 2,
    "base_seed": 4
  })");
}

std::string config_error(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("config parsing and defaults") {
  const ExperimentConfig c = parse_config(small_config());
  CHECK(c.design == Design::kLatentBase);
  CHECK(c.graph.p_o == 12);
  CHECK(c.latent.p_h == 3);
  CHECK_FALSE(c.latent.h_diag.has_value());
  CHECK(c.methods.size() == 3);
  CHECK(c.methods[1].method == Method::kTglasso);
  CHECK(c.tuning.lambda0_c == 0.5);
  CHECK(c.tuning.gamma_grid == std::vector<double>{0.5, 2.0});

  json suffixed = small_config();
  suffixed["methods"] = {"tglasso-ebic", "glasso-cv"};
  const ExperimentConfig s = parse_config(suffixed);
  CHECK(s.methods[0].mode == TuningMode::kEbic);
  CHECK(s.methods[0].explicit_mode);
  CHECK(s.methods[1].mode == TuningMode::kCv);
}

TEST_CASE("config validation") {
  json doc = small_config();
  doc["graph"]["colour"] = "red";
  CHECK(config_error(doc) == "graph: unknown field 'colour'");

  doc = small_config();
  doc["design"] = "everything";
  CHECK(config_error(doc) == "config: unknown design 'everything'");

  doc = small_config();
  doc["replicates"] = 0;
  CHECK(config_error(doc) == "replicates must be >= 1");

  doc = small_config();
  doc["methods"] = json::array();
  CHECK(config_error(doc) == "methods must be non-empty");

  doc = small_config();
  doc["methods"] = {"glasso", "ridge"};
  CHECK(config_error(doc) == "methods: unknown method 'ridge'");

  doc = small_config();
  doc["sample_sizes"] = {6};
  CHECK(config_error(doc) == "sample size 6 too small");

  doc = small_config();
  doc["replicates"] = "five";
  CHECK(config_error(doc) == "config: field 'replicates' has the wrong type");

  doc = small_config();
  doc["sweep"] = {{"knob", "p_h"}, {"values", {1, 2}}};
  CHECK(config_error(doc) == "design latent_base takes no sweep");

  doc = small_config();
  doc["design"] = "latent_knob_sweep";
  CHECK(config_error(doc) == "design latent_knob_sweep needs a sweep");
  doc["sweep"] = {{"knob", "colour"}, {"values", {1, 2}}};
  CHECK(config_error(doc) == "sweep.knob 'colour' is not a latent knob");

  doc = small_config();
  doc["design"] = "no_latent_vary_n";
  CHECK(config_error(doc) == "no-latent designs need latent.p_h == 0");
}

TEST_CASE("one setting, one method, one replicate gives one record") {
  json doc = small_config();
  doc["sample_sizes"] = {80};
  doc["methods"] = {"tglasso"};
  doc["replicates"] = 1;
  const auto records = run_experiment(parse_config(doc));
  REQUIRE(records.size() == 1);
  const ResultRecord& r = records[0];
  CHECK(r.method == "tglasso");
  CHECK(r.n == 80);
  CHECK(r.seed == 4);
  CHECK(r.converged);
  CHECK_FALSE(r.runtime_ms.has_value());
}

TEST_CASE("records are consistent and reproducible") {
  const ExperimentConfig cfg = parse_config(small_config());
  const auto a = run_experiment(cfg);
  CHECK(a.size() == 2 * 2 * 3);
  for (const auto& r : a) {
    CHECK(r.f1 == f1({r.tp, r.fp, r.fn, 0}));
    CHECK(r.edges_selected <= static_cast<std::size_t>(r.tp + r.fn));
    CHECK(static_cast<long>(r.edges_selected) == r.tp + r.fp);
  }
  RunOptions threaded;
  threaded.threads = 3;
  const std::string csv = records_csv(a);
  CHECK(records_csv(run_experiment(cfg)) == csv);
  CHECK(records_csv(run_experiment(cfg, threaded)) == csv);

  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header ==
        "design,method,knob_value,n,p_o,p_h,replicate,seed,eta,lambda,tau,gamma,edges_selected,tp,fp,fn,f1,"
        "runtime_ms,converged");
  CHECK(records_json(a).size() == a.size());
}

TEST_CASE("timing fills runtime") {
  json doc = small_config();
  doc["methods"] = {"glasso"};
  doc["sample_sizes"] = {60};
  doc["replicates"] = 1;
  RunOptions opts;
  opts.timing = true;
  const auto r = run_experiment(parse_config(doc), opts);
  REQUIRE(r[0].runtime_ms.has_value());
  CHECK(*r[0].runtime_ms >= 0.0);
}

TEST_CASE("replicate seeds and specs") {
  const ExperimentConfig cfg = parse_config(small_config());
  CHECK(replicate_seed(cfg, 0) == 4);
  CHECK(replicate_seed(cfg, 3) == 7);
  const GraphSpec a = build_spec(cfg, std::nullopt, 0);
  const GraphSpec b = build_spec(cfg, std::nullopt, 0);
  CHECK(a.theta_o == b.theta_o);
  CHECK(a.eta == b.eta);
  CHECK(build_spec(cfg, std::nullopt, 1).theta_o != a.theta_o);
}

TEST_CASE("knob sweeps hold the observed block fixed") {
  json doc = small_config();
  doc["design"] = "latent_knob_sweep";
  doc["sweep"] = {{"knob", "p_h"}, {"values", {1, 3, 6}}};
  const ExperimentConfig cfg = parse_config(doc);
  const GraphSpec a = build_spec(cfg, 1.0, 0);
  const GraphSpec b = build_spec(cfg, 6.0, 0);
  CHECK(a.theta_o == b.theta_o);
  CHECK(a.knobs.h_diag == b.knobs.h_diag);
  CHECK(a.eta < b.eta);
}

TEST_CASE("resolved config records every default") {
  const json r = resolved_config_json(parse_config(small_config()));
  CHECK(r["tuning"]["lambda0_c"] == 0.5);
  CHECK(r["input_scale"] == "correlation");
  CHECK(r["rng"] == "philox4x32-10+box-muller/v1");
  CHECK(r["base_seed"] == 4);
  CHECK(parse_config(small_config()).tuning.lambda0_c == 0.5);
}

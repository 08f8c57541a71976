#include <doctest.h>

#include <filesystem>
#include <string>

#include "tgraph/io.hpp"
#include "tgraph/simulate.hpp"

using namespace tgraph;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "tgraph_test_io";
  fs::create_directories(dir);
  return dir / name;
}

std::string error_of(const std::string& text) {
  try {
    parse_matrix_csv(text, "in.csv");
  } catch (const DataError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("numeric csv") {
  const DataMatrix m = parse_matrix_csv("1,2\n3,4\n5,6\n");
  CHECK(m.n() == 3);
  CHECK(m.p() == 2);
  CHECK(m.values()(2, 1) == 6.0);
  CHECK(m.column_names().empty());
}

TEST_CASE("header row is detected and kept") {
  const DataMatrix m = parse_matrix_csv("\"n1\",n2\n1.5,-2e-3\n+3,4\n\n");
  CHECK(m.n() == 2);
  CHECK(m.column_names() == std::vector<std::string>{"n1", "n2"});
  CHECK(m.values()(0, 1) == -2e-3);
  CHECK(m.values()(1, 0) == 3.0);
}

TEST_CASE("csv errors name the location") {
  CHECK(error_of("1,2\n3\n") == "in.csv: line 2 has 1 fields, expected 2");
  CHECK(error_of("1,2\n3,x\n") == "in.csv: line 2, column 2: 'x' is not a number");
  CHECK(error_of("1,2\n3,inf\n") == "in.csv: line 2, column 2: non-finite value");
  CHECK(error_of("1,2\nnan,1\n") == "in.csv: line 2, column 1: non-finite value");
  CHECK(error_of("") == "in.csv: empty file");
  CHECK(error_of("a,b\n") == "in.csv: header but no data rows");
  CHECK_THROWS_AS(load_matrix_csv(scratch("missing.csv")), DataError);
}

TEST_CASE("file round trip") {
  write_text(scratch("m.csv"), "a,b,c\n1,2,3\n4,5,6\n");
  const DataMatrix m = load_matrix_csv(scratch("m.csv"));
  CHECK(m.n() == 2);
  CHECK(m.p() == 3);
  write_text(scratch("labels.txt"), "x\n y \n\nz\n");
  CHECK(load_labels(scratch("labels.txt")) == std::vector<std::string>{"x", "y", "z"});
}

TEST_CASE("graph export") {
  Eigen::MatrixXd w = Eigen::MatrixXd::Identity(3, 3);
  w(0, 1) = w(1, 0) = -0.5;
  const SymMat weights = SymMat::from_matrix(w);

  const auto empty = graph_json(EdgeSet(3), weights);
  CHECK(empty["nodes"].size() == 3);
  CHECK(empty["edges"].empty());

  const auto one = graph_json(EdgeSet(3, {{0, 1}}), weights);
  REQUIRE(one["edges"].size() == 1);
  CHECK(one["edges"][0]["i"] == 0);
  CHECK(one["edges"][0]["j"] == 1);
  CHECK(one["edges"][0]["weight"] == -0.5);
  CHECK_FALSE(one["nodes"][0].contains("label"));

  const std::vector<std::string> labels{"a", "b", "c"};
  const EdgeSet edges(3, {{1, 2}, {0, 2}, {0, 1}});
  export_graph(edges, weights, &labels, scratch("g.json"));
  const ParsedGraph back = parse_graph_json(nlohmann::json::parse(read_text(scratch("g.json"))));
  CHECK(back.edges == edges);
  CHECK(back.labels == labels);
  CHECK(back.weights == std::vector<double>{-0.5, 0.0, 0.0});

  const auto doc = graph_json(edges, weights);
  CHECK(doc["edges"][0]["j"] == 1);
  CHECK(doc["edges"][2]["i"] == 1);
}

TEST_CASE("malformed graph documents") {
  CHECK_THROWS_AS(parse_graph_json(nlohmann::json::parse(R"({"edges": []})")), DataError);
  CHECK_THROWS_AS(parse_graph_json(nlohmann::json::parse(R"({"nodes": [{"id": 0}], "edges": [{"i": 0, "j": 0, "weight": 1}]})")),
                  DataError);
  CHECK_THROWS_AS(parse_graph_json(nlohmann::json::parse(
                      R"({"nodes": [{"id": 0}, {"id": 1}], "edges": [{"i": 0, "j": 1, "weight": 1}, {"i": 1, "j": 0, "weight": 1}]})")),
                  DataError);
}

TEST_CASE("spec document") {
  LatentKnobs k;
  k.p_h = 2;
  const GraphSpec spec = latent_spec(small_world_precision(6, 2, 0.1, 1.0, 1), k, 1);
  const auto doc = spec_json(spec);
  CHECK(doc["p_o"] == 6);
  CHECK(doc["p_h"] == 2);
  CHECK(doc["theta_o"].size() == 6);
  CHECK(doc["theta_oh"].size() == 6);
  CHECK(doc["theta_oh"][0].size() == 2);
  CHECK(doc["eta"] == spec.eta);
  CHECK(doc["rng"] == "philox4x32-10+box-muller/v1");
  CHECK(doc["knobs"]["h_diag"] == *spec.knobs.h_diag);
  CHECK(doc.contains("diagnostics"));
}

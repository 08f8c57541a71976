#pragma once

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tgraph/core.hpp"
#include "tgraph/simulate.hpp"

namespace tgraph {

/**
 * Rectangular numeric CSV, rows = observations. The first row is a header
 * when any of its cells fails to parse as a number. Throws DataError naming
 * the line (and column) for ragged rows, non-numeric or non-finite cells,
 * and for a file without data rows.
 */
DataMatrix load_matrix_csv(const std::filesystem::path& path);
DataMatrix parse_matrix_csv(const std::string& text, const std::string& source = "<input>");

/// One label per non-blank line, surrounding whitespace stripped.
std::vector<std::string> load_labels(const std::filesystem::path& path);

/// {nodes: [{id, label?}], edges: [{i, j, weight}]} with edges in (i, j) order.
nlohmann::json graph_json(const EdgeSet& edges, const SymMat& weights,
                          const std::vector<std::string>* labels = nullptr);
void export_graph(const EdgeSet& edges, const SymMat& weights,
                  const std::vector<std::string>* labels, const std::filesystem::path& path);

struct ParsedGraph {
  EdgeSet edges;
  std::vector<double> weights;  // aligned with edges
  std::vector<std::string> labels;  // empty when absent
};

/// Inverse of graph_json. Throws DataError on malformed documents.
ParsedGraph parse_graph_json(const nlohmann::json& doc);

nlohmann::json matrix_json(const Eigen::MatrixXd& m);
nlohmann::json spec_json(const GraphSpec& spec);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace tgraph

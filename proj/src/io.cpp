#include "tgraph/io.hpp"

#include <fmt/core.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tgraph/rng.hpp"

namespace tgraph {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_number(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  const char* first = cell.data();
  if (*first == '+') ++first;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
  return v;
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

}  // namespace

DataMatrix parse_matrix_csv(const std::string& text, const std::string& source) {
  std::vector<std::pair<int, std::vector<std::string>>> rows;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    rows.emplace_back(lineno, split_cells(line));
  }
  if (rows.empty()) throw DataError(fmt::format("{}: empty file", source));

  std::vector<std::string> names;
  std::size_t first = 0;
  for (const auto& cell : rows[0].second) {
    if (!parse_number(cell)) {
      first = 1;
      break;
    }
  }
  if (first == 1) {
    for (const auto& cell : rows[0].second) names.push_back(unquote(cell));
  }
  const std::size_t width = rows[0].second.size();
  if (rows.size() == first) throw DataError(fmt::format("{}: header but no data rows", source));

  Eigen::MatrixXd x(static_cast<Index>(rows.size() - first), static_cast<Index>(width));
  for (std::size_t r = first; r < rows.size(); ++r) {
    const auto& [ln, cells] = rows[r];
    if (cells.size() != width) {
      throw DataError(fmt::format("{}: line {} has {} fields, expected {}", source, ln, cells.size(), width));
    }
    for (std::size_t c = 0; c < width; ++c) {
      const auto v = parse_number(cells[c]);
      if (!v) {
        throw DataError(fmt::format("{}: line {}, column {}: '{}' is not a number", source, ln, c + 1, cells[c]));
      }
      if (!std::isfinite(*v)) {
        throw DataError(fmt::format("{}: line {}, column {}: non-finite value", source, ln, c + 1));
      }
      x(static_cast<Index>(r - first), static_cast<Index>(c)) = *v;
    }
  }
  return DataMatrix(std::move(x), std::move(names));
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError(fmt::format("cannot open {}", path.string()));
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  f << text;
  if (!f) throw std::runtime_error(fmt::format("write failed for {}", path.string()));
}

DataMatrix load_matrix_csv(const std::filesystem::path& path) {
  return parse_matrix_csv(read_text(path), path.string());
}

std::vector<std::string> load_labels(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::vector<std::string> labels;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (!t.empty()) labels.push_back(std::move(t));
  }
  if (labels.empty()) throw DataError(fmt::format("{}: no labels", path.string()));
  return labels;
}

nlohmann::json graph_json(const EdgeSet& edges, const SymMat& weights,
                          const std::vector<std::string>* labels) {
  if (weights.dim() != edges.dim()) throw std::invalid_argument("graph_json: dimension mismatch");
  if (labels != nullptr && static_cast<int>(labels->size()) != edges.dim()) {
    throw std::invalid_argument("graph_json: label count does not match dimension");
  }
  nlohmann::json doc;
  doc["nodes"] = nlohmann::json::array();
  for (int i = 0; i < edges.dim(); ++i) {
    nlohmann::json node{{"id", i}};
    if (labels != nullptr) node["label"] = (*labels)[static_cast<std::size_t>(i)];
    doc["nodes"].push_back(std::move(node));
  }
  doc["edges"] = nlohmann::json::array();
  for (const Edge& e : edges) doc["edges"].push_back({{"i", e.i}, {"j", e.j}, {"weight", weights(e.i, e.j)}});
  return doc;
}

void export_graph(const EdgeSet& edges, const SymMat& weights, const std::vector<std::string>* labels,
                  const std::filesystem::path& path) {
  write_text(path, graph_json(edges, weights, labels).dump(2) + "\n");
}

ParsedGraph parse_graph_json(const nlohmann::json& doc) {
  try {
    ParsedGraph g;
    const auto& nodes = doc.at("nodes");
    const int dim = static_cast<int>(nodes.size());
    for (const auto& node : nodes) {
      if (node.contains("label")) g.labels.push_back(node.at("label").get<std::string>());
    }
    if (!g.labels.empty() && static_cast<int>(g.labels.size()) != dim) {
      throw DataError("graph: labels present on some nodes only");
    }
    std::vector<Edge> edges;
    for (const auto& e : doc.at("edges")) {
      edges.push_back({e.at("i").get<int>(), e.at("j").get<int>()});
      g.weights.push_back(e.at("weight").get<double>());
    }
    g.edges = EdgeSet(dim, edges);
    if (g.edges.size() != edges.size()) throw DataError("graph: duplicate edges");
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("graph: malformed document: {}", e.what()));
  } catch (const std::invalid_argument& e) {
    throw DataError(fmt::format("graph: {}", e.what()));
  }
}

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

nlohmann::json spec_json(const GraphSpec& spec) {
  const auto& k = spec.knobs;
  const auto& d = spec.diagnostics;
  nlohmann::json doc;
  doc["p_o"] = spec.p_o;
  doc["p_h"] = spec.p_h;
  doc["seed"] = spec.seed;
  doc["rng"] = std::string(Rng::kName);
  doc["knobs"] = {{"p_h", k.p_h},
                  {"oh_magnitude", k.oh_magnitude},
                  {"h_diag", k.h_diag ? nlohmann::json(*k.h_diag) : nlohmann::json(nullptr)},
                  {"oh_sparsity", k.oh_sparsity},
                  {"h_sparsity", k.h_sparsity},
                  {"h_offdiag_magnitude", k.h_offdiag_magnitude},
                  {"observed_shift", k.observed_shift},
                  {"margin", k.margin}};
  doc["theta_o"] = matrix_json(spec.theta_o.matrix());
  doc["theta_oh"] = matrix_json(spec.theta_oh);
  doc["theta_h"] = matrix_json(spec.p_h > 0 ? spec.theta_h.matrix() : Eigen::MatrixXd());
  doc["sigma_o"] = matrix_json(spec.sigma_o.matrix());
  doc["eta"] = spec.eta;
  doc["diagnostics"] = {{"theta_o_min_eig", d.theta_o_min_eig},
                        {"theta_o_max_eig", d.theta_o_max_eig},
                        {"full_min_eig", d.full_min_eig},
                        {"full_max_eig", d.full_max_eig},
                        {"max_degree", d.max_degree},
                        {"edge_count", d.edge_count},
                        {"theta_min", d.theta_min},
                        {"latent_rank", d.latent_rank},
                        {"diag_shift", d.diag_shift},
                        {"eta_product_form", d.eta_product_form}};
  return doc;
}

}  // namespace tgraph

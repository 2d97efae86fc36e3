#pragma once

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "esgea/error.hpp"
#include "esgea/graph.hpp"

namespace esgea::io {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

/// Splits on whitespace and commas.
inline std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  auto is_sep = [](char c) { return c == ' ' || c == '\t' || c == ',' || c == '\r'; };
  while (i < s.size()) {
    while (i < s.size() && is_sep(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_sep(s[j])) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view tok, T& out) {
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

inline std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = {}) {
  std::ifstream in(path, std::ios::in | mode);
  if (!in) throw DataError("cannot open '" + path.string() + "' for reading");
  return in;
}

inline std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = {}) {
  std::ofstream out(path, std::ios::out | std::ios::trunc | mode);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  return out;
}

/// Maps raw ids to 0..n-1 in order of first appearance.
class IdCompactor {
 public:
  NodeId operator()(std::uint64_t raw) {
    auto [it, inserted] = map_.try_emplace(raw, static_cast<NodeId>(map_.size()));
    return it->second;
  }
  std::size_t size() const { return map_.size(); }

 private:
  std::unordered_map<std::uint64_t, NodeId> map_;
};

}  // namespace detail

/// Shortest decimal text that parses back to exactly the same double.
inline void append_double(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

/// Result of an edge-list load: the graph plus the original id of each node.
struct LoadedGraph {
  Graph graph;
  std::vector<std::uint64_t> original_ids;
};

/// Parses an edge list from text. `#` lines and blank lines are skipped. A
/// self-loop line "v v" declares node v without adding an edge. Ids are
/// compacted in order of first appearance. Input is always symmetrized; the
/// flag only records whether rows were directed arcs.
inline LoadedGraph parse_edge_list(std::istream& in, bool directed_input = false,
                                   const std::string& source = "<stream>") {
  (void)directed_input;
  detail::IdCompactor ids;
  std::vector<std::uint64_t> original;
  std::vector<Edge> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto body = detail::trim(line);
    if (body.empty() || body.front() == '#' || body.front() == '%') continue;
    auto toks = detail::tokens(body);
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    if (toks.size() != 2 || !detail::parse_number(toks[0], a) || !detail::parse_number(toks[1], b)) {
      throw DataError(source + ":" + std::to_string(lineno) + ": malformed edge line '" +
                      std::string(body) + "'");
    }
    const auto before = ids.size();
    const NodeId u = ids(a);
    if (ids.size() > before) original.push_back(a);
    const auto mid = ids.size();
    const NodeId v = ids(b);
    if (ids.size() > mid) original.push_back(b);
    if (u != v) edges.emplace_back(u, v);
  }
  if (ids.size() == 0) throw DataError(source + ": empty edge list");
  return {Graph::from_edges(ids.size(), edges), std::move(original)};
}

inline Graph load_edge_list(const std::filesystem::path& path, bool directed_input = false) {
  auto in = detail::open_in(path);
  return parse_edge_list(in, directed_input, path.string()).graph;
}

/// Writes one declaration line per node, then one line per undirected edge,
/// so that reloading reproduces ids and isolated nodes exactly.
inline void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# nodes " << g.num_nodes() << " edges " << g.num_edges() << '\n';
  for (NodeId v = 0; v < g.num_nodes(); ++v) out << v << ' ' << v << '\n';
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

inline void write_edge_list(const std::filesystem::path& path, const Graph& g) {
  auto out = detail::open_out(path);
  write_edge_list(out, g);
}

namespace detail {

inline Graph graph_from_json_edges(const nlohmann::json& edges, std::size_t min_nodes,
                                   const std::string& where) {
  if (!edges.is_array()) throw DataError(where + ": 'edges' must be an array");
  IdCompactor ids;
  std::vector<Edge> e;
  e.reserve(edges.size());
  for (const auto& pair : edges) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() ||
        !pair[1].is_number_integer() || pair[0].get<long long>() < 0 ||
        pair[1].get<long long>() < 0) {
      throw DataError(where + ": edge entries must be [u, v] with non-negative integers");
    }
    const NodeId u = ids(pair[0].get<std::uint64_t>());
    const NodeId v = ids(pair[1].get<std::uint64_t>());
    e.emplace_back(u, v);
  }
  const std::size_t n = std::max(ids.size(), min_nodes);
  if (n == 0) throw DataError(where + ": graph has no nodes");
  return Graph::from_edges(n, e);
}

}  // namespace detail

/// One JSON object per line: {"id": int, "edges": [[u,v],...], "label": int}.
/// An optional "num_nodes" pads trailing isolated nodes.
inline GraphCollection parse_graph_collection(std::istream& in, const std::string& source = "<stream>") {
  GraphCollection c;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto body = detail::trim(line);
    if (body.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(where + ": " + e.what());
    }
    if (!rec.contains("label") || !rec["label"].is_number_integer()) {
      throw DataError(where + ": record is missing integer field 'label'");
    }
    if (!rec.contains("edges")) throw DataError(where + ": record is missing field 'edges'");
    const std::size_t min_nodes = rec.value("num_nodes", std::size_t{0});
    Graph g = detail::graph_from_json_edges(rec["edges"], min_nodes, where);
    const int label = rec["label"].get<int>();
    g.graph_label = label;
    c.graphs.push_back(std::move(g));
    c.labels.push_back(label);
  }
  c.validate();
  return c;
}

inline GraphCollection load_graph_collection(const std::filesystem::path& path) {
  auto in = detail::open_in(path);
  return parse_graph_collection(in, path.string());
}

inline void write_graph_collection(std::ostream& out, const GraphCollection& c) {
  for (std::size_t i = 0; i < c.size(); ++i) {
    nlohmann::json edges = nlohmann::json::array();
    for (auto [u, v] : c.graphs[i].edges()) edges.push_back({u, v});
    nlohmann::json rec = {{"id", i}, {"edges", std::move(edges)}, {"label", c.labels[i]}};
    if (c.graphs[i].num_nodes() > 0) rec["num_nodes"] = c.graphs[i].num_nodes();
    out << rec.dump() << '\n';
  }
}

inline void write_graph_collection(const std::filesystem::path& path, const GraphCollection& c) {
  auto out = detail::open_out(path);
  write_graph_collection(out, c);
}

/// Adapter for the published social-graph layout: one JSON object mapping
/// graph id -> edge list, plus a CSV of `id,label` (header optional).
/// Graphs are ordered by numeric id.
inline GraphCollection parse_graph_collection_pair(std::istream& edges_json, std::istream& labels_csv,
                                                   const std::string& source = "<stream>") {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(edges_json);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(source + ": " + e.what());
  }
  if (!doc.is_object()) throw DataError(source + ": expected a JSON object mapping id to edges");

  std::unordered_map<long long, int> label_of;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(labels_csv, line)) {
    ++lineno;
    auto body = detail::trim(line);
    if (body.empty()) continue;
    auto toks = detail::tokens(body);
    long long id = 0;
    int label = 0;
    if (toks.size() < 2 || !detail::parse_number(toks[0], id) ||
        !detail::parse_number(toks[1], label)) {
      if (lineno == 1) continue;  // header
      throw DataError(source + " labels:" + std::to_string(lineno) + ": malformed label row");
    }
    label_of[id] = label;
  }

  std::vector<std::pair<long long, const nlohmann::json*>> records;
  for (const auto& [key, value] : doc.items()) {
    long long id = 0;
    if (!detail::parse_number(std::string_view(key), id)) {
      throw DataError(source + ": graph id '" + key + "' is not an integer");
    }
    records.emplace_back(id, &value);
  }
  std::sort(records.begin(), records.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  GraphCollection c;
  for (const auto& [id, value] : records) {
    auto it = label_of.find(id);
    if (it == label_of.end()) throw DataError(source + ": graph " + std::to_string(id) + " has no label");
    const nlohmann::json& edges = value->is_object() && value->contains("edges") ? (*value)["edges"] : *value;
    Graph g = detail::graph_from_json_edges(edges, 0, source + " graph " + std::to_string(id));
    g.graph_label = it->second;
    c.graphs.push_back(std::move(g));
    c.labels.push_back(it->second);
  }
  c.validate();
  return c;
}

inline GraphCollection load_graph_collection_pair(const std::filesystem::path& edges_json,
                                                  const std::filesystem::path& labels_csv) {
  auto e = detail::open_in(edges_json);
  auto l = detail::open_in(labels_csv);
  return parse_graph_collection_pair(e, l, edges_json.string());
}

// ---------------------------------------------------------------------------
// Feature matrices

/// CSV without header, one row per node. With `leading_id`, the first column
/// must be the node id 0..n-1 in order and is stripped.
inline FeatureMatrix parse_feature_csv(std::istream& in, bool leading_id = false,
                                       const std::string& source = "<stream>") {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto toks = detail::tokens(body);
    std::vector<double> row;
    row.reserve(toks.size());
    for (std::size_t i = 0; i < toks.size(); ++i) {
      double v = 0.0;
      if (!detail::parse_number(toks[i], v) || !std::isfinite(v)) {
        throw DataError(source + ":" + std::to_string(lineno) + ": bad value '" + std::string(toks[i]) + "'");
      }
      if (leading_id && i == 0) {
        if (v != static_cast<double>(rows.size())) {
          throw DataError(source + ":" + std::to_string(lineno) + ": expected node id " +
                          std::to_string(rows.size()));
        }
        continue;
      }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw DataError(source + ":" + std::to_string(lineno) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(source + ": empty feature file");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  return FeatureMatrix(std::move(m));
}

inline void write_feature_csv(std::ostream& out, const FeatureMatrix& x, bool leading_id = false) {
  std::string buf;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    buf.clear();
    if (leading_id) buf += std::to_string(r);
    for (std::size_t c = 0; c < x.cols(); ++c) {
      if (c > 0 || leading_id) buf += ',';
      append_double(buf, x(r, c));
    }
    buf += '\n';
    out << buf;
  }
}

namespace detail {

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::endian::native == std::endian::little, "big-endian hosts unsupported");
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get_le(std::istream& in, const std::string& source) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) throw DataError(source + ": truncated binary file");
  return value;
}

}  // namespace detail

/// Binary layout: [u64 rows][u64 cols][f64 row-major values], little-endian.
inline void write_feature_binary(std::ostream& out, const FeatureMatrix& x) {
  detail::put_le<std::uint64_t>(out, x.rows());
  detail::put_le<std::uint64_t>(out, x.cols());
  out.write(reinterpret_cast<const char*>(x.values().data()),
            static_cast<std::streamsize>(x.rows() * x.cols() * sizeof(double)));
}

inline FeatureMatrix read_feature_binary(std::istream& in, const std::string& source = "<stream>") {
  const auto rows = detail::get_le<std::uint64_t>(in, source);
  const auto cols = detail::get_le<std::uint64_t>(in, source);
  if (rows > (1ULL << 32) || cols > (1ULL << 24)) throw DataError(source + ": implausible matrix shape");
  Matrix m(rows, cols);
  if (!in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(rows * cols * sizeof(double)))) {
    throw DataError(source + ": truncated binary file");
  }
  return FeatureMatrix(std::move(m));
}

inline bool is_binary_path(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  return ext == ".bin" || ext == ".f64";
}

/// Reads CSV or binary by extension (.bin / .f64 are binary).
inline FeatureMatrix load_features(const std::filesystem::path& path, bool leading_id = false) {
  if (is_binary_path(path)) {
    auto in = detail::open_in(path, std::ios::binary);
    return read_feature_binary(in, path.string());
  }
  auto in = detail::open_in(path);
  return parse_feature_csv(in, leading_id, path.string());
}

inline void save_features(const std::filesystem::path& path, const FeatureMatrix& x, bool leading_id = false) {
  if (is_binary_path(path)) {
    auto out = detail::open_out(path, std::ios::binary);
    write_feature_binary(out, x);
  } else {
    auto out = detail::open_out(path);
    write_feature_csv(out, x, leading_id);
  }
}

/// Writes `text` to a sibling temp file and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    auto out = detail::open_out(tmp, std::ios::binary);
    out << text;
    if (!out) throw DataError("failed writing '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace esgea::io

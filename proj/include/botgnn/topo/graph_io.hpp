#pragma once

// Graph file, UTF-8 text:
//
//   BOTGRAPH 1
//   <n> <m> <bot_count> <topology> <seed>
//   <u> <v>            m lines, u <= v, ascending
//   <bot ids>          one line, ascending, empty when bot_count = 0

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "botgnn/errors.hpp"
#include "botgnn/topo/labeled_graph.hpp"

namespace botgnn {

// Writes via a temporary sibling file and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " -> " + path.string() + ": " +
                        ec.message());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace topo {

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view tok, std::size_t line, const char* what) {
  T value{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ParseError(std::string("bad ") + what + " '" + std::string(tok) + "'", line);
  }
  return value;
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    const auto nl = text_.find('\n', pos_);
    const auto end = nl == std::string_view::npos ? text_.size() : nl;
    line = text_.substr(pos_, end - pos_);
    pos_ = end + 1;
    ++line_no_;
    return true;
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

}  // namespace detail

inline std::string format_graph(const LabeledGraph& lg) {
  lg.validate();
  std::string out;
  out.reserve(lg.graph.m() * 14 + 64);
  out += "BOTGRAPH 1\n";
  out += std::to_string(lg.graph.n()) + ' ' + std::to_string(lg.graph.m()) + ' ' +
         std::to_string(lg.meta.bot_count) + ' ' + std::string(to_string(lg.meta.topology)) +
         ' ' + std::to_string(lg.meta.seed) + '\n';
  for (const auto& e : lg.graph.edges()) {
    out += std::to_string(e.u);
    out += ' ';
    out += std::to_string(e.v);
    out += '\n';
  }
  bool first = true;
  for (NodeId b : lg.bot_nodes()) {
    if (!first) out += ' ';
    out += std::to_string(b);
    first = false;
  }
  out += '\n';
  return out;
}

inline LabeledGraph parse_graph(std::string_view text) {
  using detail::parse_number;
  detail::LineReader reader(text);
  std::string_view line;

  if (!reader.next(line)) throw ParseError("empty file", 1);
  auto magic = detail::split_ws(line);
  if (magic.size() != 2 || magic[0] != "BOTGRAPH") throw ParseError("missing BOTGRAPH magic", 1);
  if (magic[1] != "1") throw ParseError("unsupported version " + std::string(magic[1]), 1);

  if (!reader.next(line)) throw ParseError("missing header line", 2);
  auto header = detail::split_ws(line);
  if (header.size() != 5) throw ParseError("header needs 5 fields: n m bot_count topology seed", 2);
  const auto n = parse_number<std::size_t>(header[0], 2, "node count");
  const auto m = parse_number<std::size_t>(header[1], 2, "edge count");
  const auto bots = parse_number<std::size_t>(header[2], 2, "bot count");
  TopologyKind kind;
  try {
    kind = parse_topology(header[3]);
  } catch (const ConfigError& e) {
    throw ParseError(e.what(), 2);
  }
  const auto seed = parse_number<std::uint64_t>(header[4], 2, "seed");
  if (bots > n) throw ParseError("bot_count exceeds node count", 2);

  EdgeList edges;
  edges.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    if (!reader.next(line)) {
      throw ParseError("truncated edge list: expected " + std::to_string(m) + " edges, got " +
                           std::to_string(k),
                       reader.line_no() + 1);
    }
    auto tok = detail::split_ws(line);
    const std::size_t ln = reader.line_no();
    if (tok.size() != 2) throw ParseError("edge line needs 2 fields", ln);
    const auto u = parse_number<NodeId>(tok[0], ln, "node id");
    const auto v = parse_number<NodeId>(tok[1], ln, "node id");
    if (u >= n || v >= n) throw ParseError("node id out of range", ln);
    if (u > v) throw ParseError("edge not canonical (u > v)", ln);
    if (!edges.empty() && !(edges.back() < Edge{u, v})) {
      throw ParseError("edges not strictly ascending", ln);
    }
    edges.push_back({u, v});
  }

  LabeledGraph lg;
  lg.graph = Graph::from_edges(edges, n);
  lg.labels.assign(n, 0);
  lg.meta = {kind, seed, bots};

  if (!reader.next(line)) {
    if (bots == 0) return lg;
    throw ParseError("missing bot id line", reader.line_no() + 1);
  }
  const std::size_t ln = reader.line_no();
  auto ids = detail::split_ws(line);
  if (ids.size() != bots) {
    throw ParseError("label count mismatch: expected " + std::to_string(bots) + " bot ids, got " +
                         std::to_string(ids.size()),
                     ln);
  }
  NodeId prev = 0;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const auto id = parse_number<NodeId>(ids[k], ln, "bot id");
    if (id >= n) throw ParseError("bot id out of range", ln);
    if (k > 0 && id <= prev) throw ParseError("bot ids not strictly ascending", ln);
    lg.labels[id] = 1;
    prev = id;
  }
  while (reader.next(line)) {
    if (!detail::split_ws(line).empty()) throw ParseError("trailing content", reader.line_no());
  }
  return lg;
}

inline void write_graph(const std::filesystem::path& path, const LabeledGraph& lg) {
  write_file_atomic(path, format_graph(lg));
}

inline LabeledGraph read_graph(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return parse_graph(text);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

// Plain edge list ingestion: "u v" per line, '#' starts a comment. Node
// count is max id + 1 unless given.
inline Graph read_edge_list(const std::filesystem::path& path, std::size_t n = 0) {
  const std::string text = read_file(path);
  detail::LineReader reader(text);
  std::string_view line;
  EdgeList edges;
  std::size_t max_id = 0;
  while (reader.next(line)) {
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tok = detail::split_ws(line);
    if (tok.empty()) continue;
    const std::size_t ln = reader.line_no();
    if (tok.size() < 2) throw ParseError(path.string() + ": edge line needs 2 fields", ln);
    const auto u = detail::parse_number<NodeId>(tok[0], ln, "node id");
    const auto v = detail::parse_number<NodeId>(tok[1], ln, "node id");
    max_id = std::max<std::size_t>({max_id, u, v});
    edges.push_back({u, v});
  }
  if (n == 0) n = edges.empty() ? 0 : max_id + 1;
  return Graph::from_edges(edges, n);
}

}  // namespace topo
}  // namespace botgnn

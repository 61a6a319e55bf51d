#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "graphtune/error.hpp"
#include "graphtune/graph.hpp"
#include "graphtune/pairs.hpp"

namespace graphtune {

using json = nlohmann::json;

/// Shortest form that keeps 17 significant digits; round-trips every double.
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string quote(const std::string& s) { return json(s).dump(); }

namespace detail {

inline json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedSyntax, std::string("invalid JSON: ") + e.what());
  } catch (const json::out_of_range& e) {
    // Literals such as 1e999 are valid syntax but overflow a double.
    if (e.id == 406) throw Error(ErrorCode::NonFiniteCoordinate, std::string("number out of range: ") + e.what());
    throw Error(ErrorCode::MalformedSyntax, std::string("invalid JSON: ") + e.what());
  }
}

inline const json& field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw Error(ErrorCode::MalformedSyntax, std::string("missing field '") + key + "'");
  }
  return obj.at(key);
}

inline std::string string_field(const json& obj, const char* key) {
  const auto& v = field(obj, key);
  if (!v.is_string()) {
    throw Error(ErrorCode::MalformedSyntax, std::string("field '") + key + "' must be a string");
  }
  return v.get<std::string>();
}

inline double number_field(const json& obj, const char* key) {
  const auto& v = field(obj, key);
  if (!v.is_number()) {
    throw Error(ErrorCode::MalformedSyntax, std::string("field '") + key + "' must be a number");
  }
  return v.get<double>();
}

inline const json& array_field(const json& obj, const char* key) {
  const auto& v = field(obj, key);
  if (!v.is_array()) {
    throw Error(ErrorCode::MalformedSyntax, std::string("field '") + key + "' must be an array");
  }
  return v;
}

}  // namespace detail

inline Graph graph_from_json(const json& doc) {
  std::vector<Node> nodes;
  for (const auto& n : detail::array_field(doc, "nodes")) {
    nodes.push_back({detail::string_field(n, "id"),
                     {detail::number_field(n, "x"), detail::number_field(n, "y")}});
  }
  std::vector<std::pair<std::string, std::string>> edges;
  if (doc.contains("edges")) {
    for (const auto& e : detail::array_field(doc, "edges")) {
      edges.emplace_back(detail::string_field(e, "source"), detail::string_field(e, "target"));
    }
  }
  return Graph(std::move(nodes), edges);
}

/// Parses the graph JSON format. Node order is preserved; directed or
/// repeated edges collapse to one undirected edge.
inline Graph parse_graph(std::string_view text) { return graph_from_json(detail::parse_json(text)); }

/// Canonical bytes: nodes in stored order, edges sorted by (min id, max id),
/// numbers with 17 significant digits, no whitespace.
inline std::string serialize_graph(const Graph& g) {
  std::string out = "{\"nodes\":[";
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& n = g.node(i);
    if (i) out += ',';
    out += "{\"id\":" + quote(n.id) + ",\"x\":" + format_number(n.pos.x) +
           ",\"y\":" + format_number(n.pos.y) + "}";
  }
  out += "],\"edges\":[";
  std::vector<std::pair<const std::string*, const std::string*>> edges;
  edges.reserve(g.edge_count());
  for (const auto& e : g.edges()) {
    const auto* a = &g.id(e.u);
    const auto* b = &g.id(e.v);
    if (*b < *a) std::swap(a, b);
    edges.emplace_back(a, b);
  }
  std::sort(edges.begin(), edges.end(), [](const auto& l, const auto& r) {
    if (*l.first != *r.first) return *l.first < *r.first;
    return *l.second < *r.second;
  });
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (k) out += ',';
    out += "{\"source\":" + quote(*edges[k].first) + ",\"target\":" + quote(*edges[k].second) + "}";
  }
  out += "]}";
  return out;
}

inline json graph_to_json(const Graph& g) { return json::parse(serialize_graph(g)); }

inline Structure structure_from_json(const json& doc) {
  Structure s;
  if (doc.contains("graph")) s.graph = detail::string_field(doc, "graph");
  for (const auto& n : detail::array_field(doc, "nodes")) {
    if (!n.is_string()) throw Error(ErrorCode::MalformedSyntax, "structure node ids must be strings");
    s.nodes.push_back(n.get<std::string>());
  }
  return s;
}

inline Structure parse_structure(std::string_view text) {
  return structure_from_json(detail::parse_json(text));
}

inline json structure_to_json(const Structure& s) { return {{"graph", s.graph}, {"nodes", s.nodes}}; }

inline std::string serialize_structure(const Structure& s) { return structure_to_json(s).dump(); }

inline std::vector<NodePair> pairs_from_json(const json& doc) {
  std::vector<NodePair> pairs;
  for (const auto& p : detail::array_field(doc, "pairs")) {
    pairs.push_back({detail::string_field(p, "source"), detail::string_field(p, "target")});
  }
  return pairs;
}

inline MarkerSet parse_markers(std::string_view text) {
  const auto doc = detail::parse_json(text);
  MarkerSet m{pairs_from_json(doc)};
  if (doc.contains("fallback") && doc["fallback"].is_boolean()) m.fallback = doc["fallback"].get<bool>();
  return m;
}

inline CorrespondenceSet parse_correspondences(std::string_view text) {
  return {pairs_from_json(detail::parse_json(text))};
}

inline json pairs_to_json(const std::vector<NodePair>& pairs) {
  json arr = json::array();
  for (const auto& p : pairs) arr.push_back({{"source", p.source}, {"target", p.target}});
  return {{"pairs", arr}};
}

inline std::string serialize_markers(const MarkerSet& m) {
  auto doc = pairs_to_json(m.pairs);
  if (m.fallback) doc["fallback"] = true;
  return doc.dump();
}

inline std::string serialize_correspondences(const CorrespondenceSet& c) {
  return pairs_to_json(c.pairs).dump();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace graphtune

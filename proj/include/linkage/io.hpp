#ifndef LINKAGE_IO_HPP
#define LINKAGE_IO_HPP

#include "linkage/decomposition.hpp"

#include <json.hpp>

#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>

namespace linkage {

/// Contents of a linkage description file.
struct LinkageFile {
  LinkageSpec spec;
  std::optional<Decomposition> decomposition;
};

namespace detail {

using nlohmann::json;

inline void only_keys(const json &obj, std::initializer_list<const char *> allowed, const std::string &where) {
  if (!obj.is_object()) throw InputError(where + ": expected an object");
  for (const auto &[key, _] : obj.items()) {
    bool ok = false;
    for (const char *a : allowed) ok = ok || key == a;
    if (!ok) throw InputError(where + ": unknown key \"" + key + "\"");
  }
}

inline const json &require(const json &obj, const char *key, const std::string &where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw InputError(where + ": missing key \"" + key + "\"");
  return *it;
}

inline std::string as_string(const json &j, const std::string &where) {
  if (!j.is_string()) throw InputError(where + ": expected a string");
  return j.get<std::string>();
}

inline double as_number(const json &j, const std::string &where) {
  if (!j.is_number()) throw InputError(where + ": expected a number");
  return j.get<double>();
}

inline const json &as_array(const json &j, const std::string &where) {
  if (!j.is_array()) throw InputError(where + ": expected an array");
  return j;
}

inline std::vector<std::vector<VertexId>> vertex_groups(const json &j, const std::string &where) {
  std::vector<std::vector<VertexId>> out;
  for (const auto &group : as_array(j, where)) {
    out.emplace_back();
    for (const auto &v : as_array(group, where)) out.back().push_back(as_string(v, where));
  }
  return out;
}

} // namespace detail

/// Parses a linkage description. Unknown keys are rejected; syntax errors
/// report their line and column.
inline LinkageFile parse_linkage(const std::string &text) {
  using detail::json;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error &e) {
    throw InputError(std::string("parse error: ") + e.what());
  }
  detail::only_keys(root, {"vertices", "edges", "base", "diagonals", "decomposition"}, "linkage");

  LinkageFile file;
  auto &spec = file.spec;
  for (const auto &v : detail::as_array(detail::require(root, "vertices", "linkage"), "vertices"))
    spec.vertices.push_back(detail::as_string(v, "vertices"));
  if (root.contains("edges"))
    for (const auto &e : detail::as_array(root["edges"], "edges")) {
      detail::only_keys(e, {"a", "b", "length"}, "edge");
      spec.edges.push_back({detail::as_string(detail::require(e, "a", "edge"), "edge.a"),
                            detail::as_string(detail::require(e, "b", "edge"), "edge.b"),
                            detail::as_number(detail::require(e, "length", "edge"), "edge.length")});
    }
  if (root.contains("base"))
    for (const auto &b : detail::as_array(root["base"], "base")) {
      detail::only_keys(b, {"vertex", "x", "y"}, "base");
      spec.base.push_back({detail::as_string(detail::require(b, "vertex", "base"), "base.vertex"),
                           Point(detail::as_number(detail::require(b, "x", "base"), "base.x"),
                                 detail::as_number(detail::require(b, "y", "base"), "base.y"))});
    }
  if (root.contains("diagonals"))
    for (const auto &d : detail::as_array(root["diagonals"], "diagonals")) {
      detail::only_keys(d, {"a", "b"}, "diagonal");
      spec.diagonals.push_back({detail::as_string(detail::require(d, "a", "diagonal"), "diagonal.a"),
                                detail::as_string(detail::require(d, "b", "diagonal"), "diagonal.b")});
    }
  if (root.contains("decomposition")) {
    const auto &d = root["decomposition"];
    detail::only_keys(d, {"pieces", "joints"}, "decomposition");
    Decomposition dec;
    dec.pieces = detail::vertex_groups(detail::require(d, "pieces", "decomposition"), "decomposition.pieces");
    if (d.contains("joints")) dec.joints = detail::vertex_groups(d["joints"], "decomposition.joints");
    file.decomposition = std::move(dec);
  }
  return file;
}

inline LinkageFile load_linkage(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_linkage(ss.str());
}

inline std::string to_json_text(const LinkageFile &file) {
  using detail::json;
  json root;
  root["vertices"] = file.spec.vertices;
  root["edges"] = json::array();
  for (const auto &e : file.spec.edges) root["edges"].push_back({{"a", e.a}, {"b", e.b}, {"length", e.length}});
  root["base"] = json::array();
  for (const auto &b : file.spec.base)
    root["base"].push_back({{"vertex", b.vertex}, {"x", b.position.x()}, {"y", b.position.y()}});
  root["diagonals"] = json::array();
  for (const auto &d : file.spec.diagonals) root["diagonals"].push_back({{"a", d.a}, {"b", d.b}});
  if (file.decomposition)
    root["decomposition"] = {{"pieces", file.decomposition->pieces}, {"joints", file.decomposition->joints}};
  return root.dump(2) + "\n";
}

} // namespace linkage

#endif // LINKAGE_IO_HPP

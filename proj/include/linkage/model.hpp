#ifndef LINKAGE_MODEL_HPP
#define LINKAGE_MODEL_HPP

#include "linkage/core.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace linkage {

struct Edge {
  VertexId a;
  VertexId b;
  double length = 0.0;
};

struct BasePoint {
  VertexId vertex;
  Point position = Point::Zero();
};

struct VertexPair {
  VertexId a;
  VertexId b;
};

/// Unordered key for a vertex pair.
inline std::pair<VertexId, VertexId> pair_key(const VertexId &a, const VertexId &b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

/// A planar linkage: graph, bar lengths, fixed vertices and marked diagonals.
struct LinkageSpec {
  std::vector<VertexId> vertices;
  std::vector<Edge> edges;
  std::vector<BasePoint> base;
  std::vector<VertexPair> diagonals;

  bool has_vertex(const VertexId &v) const {
    return std::find(vertices.begin(), vertices.end(), v) != vertices.end();
  }

  bool is_base(const VertexId &v) const {
    return std::any_of(base.begin(), base.end(),
                       [&](const BasePoint &b) { return b.vertex == v; });
  }

  std::optional<Point> base_position(const VertexId &v) const {
    for (const auto &b : base)
      if (b.vertex == v) return b.position;
    return std::nullopt;
  }

  std::optional<std::size_t> edge_index(const VertexId &a, const VertexId &b) const {
    const auto key = pair_key(a, b);
    for (std::size_t i = 0; i < edges.size(); ++i)
      if (pair_key(edges[i].a, edges[i].b) == key) return i;
    return std::nullopt;
  }

  bool has_edge(const VertexId &a, const VertexId &b) const {
    return edge_index(a, b).has_value();
  }
};

// ---------------------------------------------------------------------------
// Validation

enum class ViolationKind {
  DuplicateVertex,
  DuplicateEdge,
  EdgeSelfLoop,
  EdgeUnknownVertex,
  NonPositiveLength,
  BaseUnknownVertex,
  DuplicateBase,
  CoincidentBase,
  BaseBarMismatch,
  DiagonalUnknownVertex,
  DiagonalSelfLoop,
  DiagonalIsEdge,
  DuplicateDiagonal,
};

struct Violation {
  ViolationKind kind;
  std::string message;
};

/// Checks the structural invariants of a spec. An empty result means valid.
inline std::vector<Violation> validate_spec(const LinkageSpec &spec) {
  std::vector<Violation> out;
  auto add = [&](ViolationKind k, std::string msg) { out.push_back({k, std::move(msg)}); };

  std::set<VertexId> seen;
  for (const auto &v : spec.vertices)
    if (!seen.insert(v).second) add(ViolationKind::DuplicateVertex, "duplicate vertex " + v);

  std::set<std::pair<VertexId, VertexId>> edge_keys;
  for (const auto &e : spec.edges) {
    const std::string name = e.a + e.b;
    if (e.a == e.b) add(ViolationKind::EdgeSelfLoop, "edge " + name + " has equal endpoints");
    if (!seen.count(e.a) || !seen.count(e.b))
      add(ViolationKind::EdgeUnknownVertex, "edge " + name + " references an unknown vertex");
    if (!(e.length > 0.0) || !std::isfinite(e.length))
      add(ViolationKind::NonPositiveLength, "edge " + name + " has non-positive length");
    if (!edge_keys.insert(pair_key(e.a, e.b)).second)
      add(ViolationKind::DuplicateEdge, "duplicate edge " + name);
  }

  std::set<VertexId> base_seen;
  for (std::size_t i = 0; i < spec.base.size(); ++i) {
    const auto &b = spec.base[i];
    if (!seen.count(b.vertex))
      add(ViolationKind::BaseUnknownVertex, "base vertex " + b.vertex + " is not a vertex");
    if (!base_seen.insert(b.vertex).second)
      add(ViolationKind::DuplicateBase, "base vertex " + b.vertex + " listed twice");
    for (std::size_t j = 0; j < i; ++j)
      if (spec.base[j].vertex != b.vertex && spec.base[j].position == b.position)
        add(ViolationKind::CoincidentBase,
            "base vertices " + spec.base[j].vertex + " and " + b.vertex + " share a position");
  }
  for (const auto &e : spec.edges) {
    auto pa = spec.base_position(e.a);
    auto pb = spec.base_position(e.b);
    if (pa && pb && std::abs((*pa - *pb).norm() - e.length) > 1e-9 * (1.0 + e.length))
      add(ViolationKind::BaseBarMismatch,
          "bar " + e.a + e.b + " between base vertices disagrees with their distance");
  }

  std::set<std::pair<VertexId, VertexId>> diag_keys;
  for (const auto &d : spec.diagonals) {
    const std::string name = d.a + d.b;
    if (!seen.count(d.a) || !seen.count(d.b))
      add(ViolationKind::DiagonalUnknownVertex, "diagonal " + name + " references an unknown vertex");
    if (d.a == d.b) add(ViolationKind::DiagonalSelfLoop, "diagonal " + name + " has equal endpoints");
    if (edge_keys.count(pair_key(d.a, d.b)))
      add(ViolationKind::DiagonalIsEdge, "diagonal " + name + " coincides with edge");
    if (!diag_keys.insert(pair_key(d.a, d.b)).second)
      add(ViolationKind::DuplicateDiagonal, "duplicate diagonal " + name);
  }
  return out;
}

/// True if the bar graph (ignoring diagonals) is connected.
inline bool is_connected(const LinkageSpec &spec) {
  if (spec.vertices.empty()) return true;
  std::map<VertexId, std::vector<VertexId>> adj;
  for (const auto &e : spec.edges) {
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  std::set<VertexId> reached{spec.vertices.front()};
  std::vector<VertexId> stack{spec.vertices.front()};
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    for (const auto &w : adj[v])
      if (reached.insert(w).second) stack.push_back(w);
  }
  return reached.size() == spec.vertices.size();
}

// ---------------------------------------------------------------------------
// Pinning

enum class PinMode {
  Identity,   ///< already two or more base vertices
  OneBase,    ///< a neighbour of the single base vertex was fixed
  NoBase,     ///< both ends of a bar were fixed
};

struct PinReport {
  PinMode mode = PinMode::Identity;
  std::optional<Edge> removed_bar;
};

/// A spec with at least two base vertices, so realizations are not identified
/// by any rigid motion.
struct PinnedSpec {
  LinkageSpec spec;
  std::vector<VertexId> movable;
  PinReport report;

  std::size_t movable_count() const { return movable.size(); }
  std::size_t ambient_dimension() const { return 2 * movable.size(); }

  /// Bars with at least one movable endpoint. Bars between two base vertices
  /// have constant length and contribute no constraint.
  std::vector<std::size_t> active_bars() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < spec.edges.size(); ++i)
      if (!(spec.is_base(spec.edges[i].a) && spec.is_base(spec.edges[i].b))) out.push_back(i);
    return out;
  }
};

struct PinOptions {
  /// Pinning a bar of a base-free linkage still removes the whole SE(2) action
  /// when the bar graph is disconnected; set this to allow it.
  bool allow_disconnected = false;
};

namespace detail {

inline std::vector<VertexId> movable_of(const LinkageSpec &spec) {
  std::vector<VertexId> out;
  for (const auto &v : spec.vertices)
    if (!spec.is_base(v)) out.push_back(v);
  return out;
}

inline std::size_t smallest_edge(const LinkageSpec &spec, const std::vector<std::size_t> &candidates) {
  return *std::min_element(candidates.begin(), candidates.end(), [&](std::size_t i, std::size_t j) {
    return pair_key(spec.edges[i].a, spec.edges[i].b) < pair_key(spec.edges[j].a, spec.edges[j].b);
  });
}

} // namespace detail

/// Fixes enough vertices to kill the isometry group without changing the
/// configuration space.
///
/// With two or more base vertices the linkage is returned unchanged. With one,
/// a neighbour of the base vertex is placed at distance l along +x from it and
/// the connecting bar is removed. With none, `preferred` (default: the
/// lexicographically smallest bar) is laid from (0,0) to (l,0) and removed.
inline PinnedSpec pin(const LinkageSpec &spec,
                      const std::optional<VertexPair> &preferred = std::nullopt,
                      PinOptions options = {}) {
  PinnedSpec out;
  out.spec = spec;
  if (spec.base.size() >= 2) {
    out.movable = detail::movable_of(spec);
    return out;
  }
  if (!options.allow_disconnected && !is_connected(spec))
    throw InputError("cannot pin disconnected linkage");
  if (spec.edges.empty()) throw InputError("cannot pin linkage: no bars available");

  std::optional<std::size_t> chosen;
  if (preferred) {
    chosen = spec.edge_index(preferred->a, preferred->b);
    if (!chosen) throw InputError("preferred bar " + preferred->a + preferred->b + " is not a bar");
  }

  Edge fixed;
  if (spec.base.size() == 1) {
    const auto &anchor = spec.base.front();
    std::vector<std::size_t> incident;
    for (std::size_t i = 0; i < spec.edges.size(); ++i)
      if (spec.edges[i].a == anchor.vertex || spec.edges[i].b == anchor.vertex) incident.push_back(i);
    if (incident.empty()) throw InputError("cannot pin linkage: base vertex has no bars");
    if (!chosen || std::find(incident.begin(), incident.end(), *chosen) == incident.end())
      chosen = detail::smallest_edge(spec, incident);
    fixed = spec.edges[*chosen];
    const VertexId other = fixed.a == anchor.vertex ? fixed.b : fixed.a;
    out.spec.base.push_back({other, anchor.position + Point(fixed.length, 0.0)});
    out.report.mode = PinMode::OneBase;
  } else {
    std::vector<std::size_t> all(spec.edges.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    if (!chosen) {
      chosen = detail::smallest_edge(spec, all);
      fixed = spec.edges[*chosen];
      if (fixed.b < fixed.a) std::swap(fixed.a, fixed.b);
    } else {
      fixed = spec.edges[*chosen];
      if (fixed.a != preferred->a) std::swap(fixed.a, fixed.b);
    }
    out.spec.base.push_back({fixed.a, Point(0.0, 0.0)});
    out.spec.base.push_back({fixed.b, Point(fixed.length, 0.0)});
    out.report.mode = PinMode::NoBase;
  }
  out.spec.edges.erase(out.spec.edges.begin() + static_cast<std::ptrdiff_t>(*chosen));
  out.report.removed_bar = fixed;
  out.movable = detail::movable_of(out.spec);
  return out;
}

/// 2n - q for a pinned, non-redundant linkage.
inline int degrees_of_freedom(const PinnedSpec &pinned) {
  const int n = static_cast<int>(pinned.movable_count());
  const int q = static_cast<int>(pinned.active_bars().size());
  if (q > 2 * n) throw InputError("over-constrained: 2n < q");
  return 2 * n - q;
}

// ---------------------------------------------------------------------------
// Homothety

/// Power of c relating the canonical volume of cL to that of L.
struct HomothetyLaw {
  int exponent = 0;
  bool connected = true;
};

inline HomothetyLaw homothety_law(const LinkageSpec &spec) {
  const int e = static_cast<int>(spec.edges.size());
  const int v = static_cast<int>(spec.vertices.size());
  const int b = static_cast<int>(spec.base.size());
  HomothetyLaw law;
  law.connected = is_connected(spec);
  law.exponent = b >= 2 ? 2 * (e - (v - b)) : 2 * (e - v + 1);
  return law;
}

/// Multiplies every bar length and base position by c.
inline LinkageSpec scale(const LinkageSpec &spec, double c) {
  if (!(c > 0.0)) throw InputError("scale factor must be positive");
  LinkageSpec out = spec;
  for (auto &e : out.edges) e.length *= c;
  for (auto &b : out.base) b.position *= c;
  return out;
}

/// Turns marked diagonal `index` into a bar of the given length.
inline LinkageSpec add_diagonal_bar(const LinkageSpec &spec, std::size_t index, double length) {
  if (index >= spec.diagonals.size()) throw InputError("diagonal index out of range");
  LinkageSpec out = spec;
  const auto d = out.diagonals[index];
  out.diagonals.erase(out.diagonals.begin() + static_cast<std::ptrdiff_t>(index));
  out.edges.push_back({d.a, d.b, length});
  return out;
}

} // namespace linkage

#endif // LINKAGE_MODEL_HPP

#ifndef LINKAGE_DECOMPOSITION_HPP
#define LINKAGE_DECOMPOSITION_HPP

#include "linkage/nambu.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

namespace linkage {

/// Acyclic semi-rigid connected sum: sublinkages generated by vertex subsets,
/// glued along disjoint joints. Marked diagonals come from the linkage.
struct Decomposition {
  std::vector<std::vector<VertexId>> pieces;
  std::vector<std::vector<VertexId>> joints;
};

struct DecompositionReport {
  std::vector<std::string> violations;
  /// Valid but noteworthy, e.g. a piece that contributes no vector field.
  std::vector<std::string> warnings;

  bool ok() const { return violations.empty(); }
};

namespace detail {

inline bool contains_all(const std::vector<VertexId> &set, const std::vector<VertexId> &subset) {
  return std::all_of(subset.begin(), subset.end(), [&](const VertexId &v) {
    return std::find(set.begin(), set.end(), v) != set.end();
  });
}

inline bool contains(const std::vector<VertexId> &set, const VertexId &v) {
  return std::find(set.begin(), set.end(), v) != set.end();
}

} // namespace detail

/// (piece, joint) pairs with the joint contained in the piece.
inline std::vector<std::pair<std::size_t, std::size_t>> incidence(const Decomposition &dec) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < dec.pieces.size(); ++i)
    for (std::size_t k = 0; k < dec.joints.size(); ++k)
      if (!dec.joints[k].empty() && detail::contains_all(dec.pieces[i], dec.joints[k])) out.emplace_back(i, k);
  return out;
}

/// Indices of the marked diagonals with both ends in `vertices`.
inline std::vector<std::size_t> diagonals_within(const LinkageSpec &spec, const std::vector<VertexId> &vertices) {
  std::vector<std::size_t> out;
  for (std::size_t d = 0; d < spec.diagonals.size(); ++d)
    if (detail::contains(vertices, spec.diagonals[d].a) && detail::contains(vertices, spec.diagonals[d].b))
      out.push_back(d);
  return out;
}

/// Sublinkage generated by `vertices`: induced bars and marked diagonals, in
/// the parent's order. Base vertices are dropped.
inline LinkageSpec induced_spec(const LinkageSpec &spec, const std::vector<VertexId> &vertices) {
  LinkageSpec out;
  for (const auto &v : spec.vertices)
    if (detail::contains(vertices, v)) out.vertices.push_back(v);
  for (const auto &e : spec.edges)
    if (detail::contains(vertices, e.a) && detail::contains(vertices, e.b)) out.edges.push_back(e);
  for (auto d : diagonals_within(spec, vertices)) out.diagonals.push_back(spec.diagonals[d]);
  return out;
}

/// Pinned system of piece i with its diagonals marked.
inline ConstraintSystem piece_system(const LinkageSpec &spec, const Decomposition &dec, std::size_t i) {
  if (i >= dec.pieces.size()) throw InputError("piece index out of range");
  return ConstraintSystem(pin(induced_spec(spec, dec.pieces[i]), std::nullopt, {.allow_disconnected = true}));
}

/// dim M of piece i (its diagonals not fixed).
inline int piece_dimension(const LinkageSpec &spec, const Decomposition &dec, std::size_t i) {
  return degrees_of_freedom(piece_system(spec, dec, i).pinned());
}

struct SystemType {
  int p = 0;                  ///< number of commuting vector fields
  int q = 0;                  ///< number of first integrals (marked diagonals)
  std::vector<int> per_piece; ///< p_i = dim M_i - |D_i|
};

inline SystemType system_type(const LinkageSpec &spec, const Decomposition &dec) {
  SystemType t;
  t.q = static_cast<int>(spec.diagonals.size());
  for (std::size_t i = 0; i < dec.pieces.size(); ++i) {
    const int pi = piece_dimension(spec, dec, i) - static_cast<int>(diagonals_within(spec, dec.pieces[i]).size());
    t.per_piece.push_back(pi);
    t.p += pi;
  }
  return t;
}

/// Half squared lengths of all marked diagonals, in marked order.
inline Eigen::VectorXd first_integrals(const ConstraintSystem &whole, const Coordinates &x) {
  return evaluate_constraints(whole, x).diagonals;
}

namespace detail {

inline void check_tree(const Decomposition &dec, DecompositionReport &report) {
  const auto edges = incidence(dec);
  const std::size_t nodes = dec.pieces.size() + dec.joints.size();
  // union-find over I (0..|I|-1) and K (|I|..)
  std::vector<std::size_t> parent(nodes);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  std::function<std::size_t(std::size_t)> find = [&](std::size_t a) {
    return parent[a] == a ? a : parent[a] = find(parent[a]);
  };
  bool cycle = false;
  for (auto [i, k] : edges) {
    auto a = find(i), b = find(dec.pieces.size() + k);
    if (a == b) cycle = true;
    else parent[a] = b;
  }
  if (cycle) report.violations.push_back("incidence graph of pieces and joints has a cycle");
  std::set<std::size_t> roots;
  for (std::size_t n = 0; n < nodes; ++n) roots.insert(find(n));
  if (roots.size() > 1) report.violations.push_back("incidence graph of pieces and joints is not connected");
}

/// Joint k with its marked diagonals turned into bars at their lengths in `at`.
inline LinkageSpec rigidified_joint(const LinkageSpec &spec, const std::vector<VertexId> &joint,
                                    const std::map<VertexId, Point> &at) {
  LinkageSpec j = induced_spec(spec, joint);
  for (const auto &d : j.diagonals) j.edges.push_back({d.a, d.b, (at.at(d.a) - at.at(d.b)).norm()});
  j.diagonals.clear();
  return j;
}

} // namespace detail

/// Combinatorial conditions of an acyclic semi-rigid connected sum, numerical
/// semi-rigidity of every joint, and dim M_i >= |D_i| for every piece.
inline DecompositionReport validate_decomposition(const LinkageSpec &spec, const Decomposition &dec,
                                                  std::uint64_t seed = 42) {
  DecompositionReport report;
  auto bad = [&](std::string m) { report.violations.push_back(std::move(m)); };
  auto name = [](const std::vector<VertexId> &vs) {
    std::string s = "{";
    for (std::size_t i = 0; i < vs.size(); ++i) s += (i ? "," : "") + vs[i];
    return s + "}";
  };

  if (!spec.base.empty()) bad("linkages with base vertices cannot be decomposed (base-point pieces are not supported)");
  if (dec.pieces.empty()) bad("decomposition has no pieces");

  for (const auto &group : {&dec.pieces, &dec.joints})
    for (const auto &vs : *group)
      for (const auto &v : vs)
        if (!spec.has_vertex(v)) bad("decomposition references unknown vertex " + v);
  if (!report.ok()) return report;

  for (const auto &v : spec.vertices)
    if (std::none_of(dec.pieces.begin(), dec.pieces.end(), [&](const auto &p) { return detail::contains(p, v); }))
      bad("vertex " + v + " is in no piece");
  for (const auto &e : spec.edges)
    if (std::none_of(dec.pieces.begin(), dec.pieces.end(),
                     [&](const auto &p) { return detail::contains(p, e.a) && detail::contains(p, e.b); }))
      bad("bar " + e.a + e.b + " is in no piece");

  for (std::size_t k = 0; k < dec.joints.size(); ++k) {
    if (dec.joints[k].size() < 2)
      bad("joint " + name(dec.joints[k]) + " has fewer than 2 vertices (one-point joints are an excluded case)");
    for (std::size_t l = 0; l < k; ++l)
      for (const auto &v : dec.joints[k])
        if (detail::contains(dec.joints[l], v)) bad("joints " + name(dec.joints[l]) + " and " + name(dec.joints[k]) + " share vertex " + v);
  }

  for (std::size_t i = 0; i < dec.pieces.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      std::vector<VertexId> common;
      for (const auto &v : dec.pieces[i])
        if (detail::contains(dec.pieces[j], v)) common.push_back(v);
      if (common.empty()) continue;
      const bool is_joint = std::any_of(dec.joints.begin(), dec.joints.end(), [&](const auto &jk) {
        return jk.size() == common.size() && detail::contains_all(jk, common);
      });
      if (!is_joint) bad("pieces " + name(dec.pieces[j]) + " and " + name(dec.pieces[i]) + " intersect in " + name(common) + ", which is not a joint");
    }

  for (const auto &d : spec.diagonals)
    if (std::none_of(dec.joints.begin(), dec.joints.end(),
                     [&](const auto &jk) { return detail::contains(jk, d.a) && detail::contains(jk, d.b); }))
      bad("marked diagonal " + d.a + d.b + " is not a diagonal of a joint");

  detail::check_tree(dec, report);
  if (!report.ok()) return report;

  // Numerical part: semi-rigidity of joints and piece dimensions.
  std::map<VertexId, Point> at;
  try {
    const ConstraintSystem whole(pin(spec));
    at = whole.positions(random_feasible(whole, seed).coordinates);
  } catch (const std::exception &e) {
    bad(std::string("cannot realize linkage: ") + e.what());
    return report;
  }

  for (std::size_t k = 0; k < dec.joints.size(); ++k) {
    const std::string jn = "joint " + name(dec.joints[k]);
    try {
      const PinnedSpec pj = pin(detail::rigidified_joint(spec, dec.joints[k], at));
      if (degrees_of_freedom(pj) != 0) {
        bad(jn + " is not rigid once its diagonals are fixed");
        continue;
      }
      const ConstraintSystem js(pj);
      for (int s = 0; s < 3; ++s) {
        const auto r = random_feasible(js, derive_seed(seed, 100 + static_cast<std::uint64_t>(s)));
        const Eigen::MatrixXd jac = constraint_jacobian(js, r.coordinates, false);
        if (numerical_rank(jac) < jac.rows()) {
          bad(jn + " has a rank-deficient Jacobian once its diagonals are fixed");
          break;
        }
      }
    } catch (const std::exception &e) {
      bad(jn + " is not rigid once its diagonals are fixed (" + e.what() + ")");
    }
  }

  for (std::size_t i = 0; i < dec.pieces.size(); ++i) {
    const std::string pn = "piece " + name(dec.pieces[i]);
    try {
      const int dim = piece_dimension(spec, dec, i);
      const int di = static_cast<int>(diagonals_within(spec, dec.pieces[i]).size());
      if (dim < di) bad(pn + " has more marked diagonals than its dimension");
      else if (dim == di) report.warnings.push_back(pn + " has dim M = |D_i| and contributes no vector field");
    } catch (const std::exception &e) {
      bad(pn + ": " + e.what());
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Lifted fields

/// Velocity field of a piece in its own pinned chart.
using PieceEvaluator = std::function<Coordinates(const ConstraintSystem &, const Coordinates &)>;

/// Infinitesimal rigid motion v(p) = omega * perp(p - centre) + t.
struct RigidMotion {
  double omega = 0.0;
  Point centre = Point::Zero();
  Point t = Point::Zero();
  double residual = 0.0; ///< RMS misfit of the least-squares fit

  Point velocity(const Point &p) const { return omega * perp(p - centre) + t; }
};

/// Largest relative misfit accepted when the velocities of a joint with more
/// than two vertices are fitted by a rigid motion. Two points always match.
inline constexpr double kRigidFitTolerance = 1e-9;

/// Least-squares rigid motion matching velocities at points.
inline RigidMotion rigid_fit(const std::vector<Point> &points, const std::vector<Point> &velocities) {
  RigidMotion m;
  const auto n = static_cast<double>(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    m.centre += points[i] / n;
    m.t += velocities[i] / n;
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point r = points[i] - m.centre;
    num += cross(r, velocities[i] - m.t);
    den += r.squaredNorm();
  }
  if (den == 0.0) throw NumericalError("singular joint configuration (coincident joint vertices)");
  m.omega = num / den;
  double misfit = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) misfit += (m.velocity(points[i]) - velocities[i]).squaredNorm();
  m.residual = std::sqrt(misfit / n);
  return m;
}

/// Horizontal lift of a piece's vector field to the whole linkage: the piece
/// moves by its own field and every other piece follows its parent joint as a
/// rigid body, walking the incidence tree outward.
class LiftedField {
public:
  LiftedField(const LinkageSpec &spec, Decomposition dec, std::size_t piece,
              PieceEvaluator evaluator = {})
      : dec_(std::move(dec)), piece_(piece), whole_(pin(spec)),
        piece_system_(piece_system(spec, dec_, piece)), evaluator_(std::move(evaluator)) {
    if (!evaluator_) {
      const auto rows = piece_system_.bar_count() + piece_system_.diagonal_count();
      if (rows + 1 != piece_system_.dimension())
        throw InputError("piece " + std::to_string(piece) +
                         " is not 1DOF with its diagonals fixed; supply a piece evaluator");
      evaluator_ = [field = NambuField(piece_system_)](const ConstraintSystem &, const Coordinates &x) {
        return evaluate_field(field, x);
      };
    }
    const auto &bar = *piece_system_.pinned().report.removed_bar;
    frame_ = {bar.a, bar.b};
    const auto &wp = whole_.pinned();
    if (wp.report.removed_bar) gauge_ = {wp.report.removed_bar->a, wp.report.removed_bar->b};
    else gauge_ = {wp.spec.base[0].vertex, wp.spec.base[1].vertex};

    // Breadth-first order of (joint, child piece) away from `piece`.
    const auto inc = incidence(dec_);
    std::set<std::size_t> seen_pieces{piece}, seen_joints;
    std::vector<std::size_t> queue{piece};
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const auto cur = queue[head];
      for (auto [i, k] : inc) {
        if (i != cur || !seen_joints.insert(k).second) continue;
        for (auto [i2, k2] : inc)
          if (k2 == k && seen_pieces.insert(i2).second) {
            steps_.push_back({k, i2});
            queue.push_back(i2);
          }
      }
    }
  }

  std::size_t piece_index() const { return piece_; }
  int field_index() const { return 1; }
  const Decomposition &decomposition() const { return dec_; }
  const ConstraintSystem &whole_system() const { return whole_; }
  const ConstraintSystem &piece() const { return piece_system_; }

  /// Velocities of every vertex, normalised so that `gauge` vertices are at rest.
  std::map<VertexId, Point> velocities(const std::map<VertexId, Point> &pos,
                                       std::pair<VertexId, VertexId> gauge) const {
    // Piece chart: frame_.first at the origin, frame_.second on the +x axis.
    const Point origin = pos.at(frame_.first);
    const Point axis = pos.at(frame_.second) - origin;
    const double len = axis.norm();
    if (len == 0.0) throw NumericalError("singular configuration: pinned bar has zero length");
    Eigen::Matrix2d rot; // world -> chart
    rot << axis.x(), axis.y(), -axis.y(), axis.x();
    rot /= len;

    const auto &movable = piece_system_.pinned().movable;
    Coordinates xi(piece_system_.dimension());
    for (std::size_t m = 0; m < movable.size(); ++m)
      xi.segment<2>(2 * static_cast<Eigen::Index>(m)) = rot * (pos.at(movable[m]) - origin);
    const Coordinates ui = evaluator_(piece_system_, xi);

    std::map<VertexId, Point> vel;
    vel[frame_.first] = Point::Zero();
    vel[frame_.second] = Point::Zero();
    for (std::size_t m = 0; m < movable.size(); ++m)
      vel[movable[m]] = rot.transpose() * Point(ui.segment<2>(2 * static_cast<Eigen::Index>(m)));

    for (const auto &[k, child] : steps_) {
      std::vector<Point> pts, vs;
      for (const auto &v : dec_.joints[k]) {
        pts.push_back(pos.at(v));
        vs.push_back(vel.at(v));
      }
      const RigidMotion motion = rigid_fit(pts, vs);
      double speed = 0.0;
      for (const auto &v : vs) speed = std::max(speed, v.norm());
      if (pts.size() > 2 && motion.residual > kRigidFitTolerance * (1.0 + speed))
        throw NumericalError("joint velocities are not an infinitesimal rigid motion (misfit " +
                             std::to_string(motion.residual) + ")");
      for (const auto &v : dec_.pieces[child])
        if (!vel.count(v)) vel[v] = motion.velocity(pos.at(v));
    }

    const RigidMotion g = rigid_fit({pos.at(gauge.first), pos.at(gauge.second)},
                                    {vel.at(gauge.first), vel.at(gauge.second)});
    for (auto &[v, u] : vel) u -= g.velocity(pos.at(v));
    return vel;
  }

private:
  Decomposition dec_;
  std::size_t piece_;
  ConstraintSystem whole_;
  ConstraintSystem piece_system_;
  PieceEvaluator evaluator_;
  std::pair<VertexId, VertexId> frame_;
  std::pair<VertexId, VertexId> gauge_;
  std::vector<std::pair<std::size_t, std::size_t>> steps_;

  friend Coordinates lifted_field_evaluate(const LiftedField &, const Coordinates &);
};

/// The lifted field in the whole linkage's pinned coordinates.
inline Coordinates lifted_field_evaluate(const LiftedField &field, const Coordinates &x) {
  const auto &whole = field.whole_;
  const auto vel = field.velocities(whole.positions(x), field.gauge_);
  Coordinates out(whole.dimension());
  const auto &movable = whole.pinned().movable;
  for (std::size_t m = 0; m < movable.size(); ++m) out.segment<2>(2 * static_cast<Eigen::Index>(m)) = vel.at(movable[m]);
  return out;
}

} // namespace linkage

#endif // LINKAGE_DECOMPOSITION_HPP

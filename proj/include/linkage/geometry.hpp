#ifndef LINKAGE_GEOMETRY_HPP
#define LINKAGE_GEOMETRY_HPP

#include "linkage/model.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace linkage {

/// One end of a bar or diagonal: either a coordinate slot or a fixed point.
struct Endpoint {
  int slot = -1; ///< movable-vertex index, or -1 for a base vertex
  Point fixed = Point::Zero();
};

/// Half squared distance between two endpoints, with its target value.
struct PairTerm {
  Endpoint a;
  Endpoint b;
  double target = 0.0;
};

/// Joint length map of a pinned linkage over the coordinates
/// (x_1, y_1, ..., x_n, y_n) of its movable vertices.
class ConstraintSystem {
public:
  explicit ConstraintSystem(PinnedSpec pinned) : pinned_(std::move(pinned)) {
    const auto &spec = pinned_.spec;
    for (std::size_t i = 0; i < pinned_.movable.size(); ++i)
      slots_[pinned_.movable[i]] = static_cast<int>(i);
    for (std::size_t i : pinned_.active_bars()) {
      const auto &e = spec.edges[i];
      bars_.push_back({endpoint(e.a), endpoint(e.b), 0.5 * e.length * e.length});
      bar_edges_.push_back(i);
      max_length_sq_ = std::max(max_length_sq_, e.length * e.length);
    }
    for (const auto &d : spec.diagonals) {
      if (!spec.has_vertex(d.a) || !spec.has_vertex(d.b))
        throw InputError("diagonal " + d.a + d.b + " references an unknown vertex");
      diagonals_.push_back({endpoint(d.a), endpoint(d.b), 0.0});
    }
  }

  const PinnedSpec &pinned() const { return pinned_; }
  const LinkageSpec &spec() const { return pinned_.spec; }
  std::size_t dimension() const { return 2 * pinned_.movable.size(); }
  std::size_t bar_count() const { return bars_.size(); }
  std::size_t diagonal_count() const { return diagonals_.size(); }
  const std::vector<PairTerm> &bars() const { return bars_; }
  const std::vector<PairTerm> &diagonals() const { return diagonals_; }

  /// Index into spec().edges of each constraint row.
  const std::vector<std::size_t> &bar_edges() const { return bar_edges_; }

  /// Scale for relative residual tolerances: 1 + max l^2.
  double residual_scale() const { return 1.0 + max_length_sq_; }

  Eigen::VectorXd targets() const {
    Eigen::VectorXd t(bars_.size());
    for (std::size_t i = 0; i < bars_.size(); ++i) t[static_cast<Eigen::Index>(i)] = bars_[i].target;
    return t;
  }

  /// Movable slot of a vertex, or -1 for base vertices.
  int slot_of(const VertexId &v) const {
    auto it = slots_.find(v);
    if (it != slots_.end()) return it->second;
    if (pinned_.spec.is_base(v)) return -1;
    throw InputError("unknown vertex " + v);
  }

  Endpoint endpoint(const VertexId &v) const {
    const int s = slot_of(v);
    if (s >= 0) return {s, Point::Zero()};
    return {-1, *pinned_.spec.base_position(v)};
  }

  static Point position(const Coordinates &x, const Endpoint &e) {
    if (e.slot < 0) return e.fixed;
    return {x[2 * e.slot], x[2 * e.slot + 1]};
  }

  Point position(const Coordinates &x, const VertexId &v) const { return position(x, endpoint(v)); }

  /// Plane positions of every vertex, base vertices included.
  std::map<VertexId, Point> positions(const Coordinates &x) const {
    std::map<VertexId, Point> out;
    for (const auto &v : pinned_.spec.vertices) out[v] = position(x, v);
    return out;
  }

  Coordinates coordinates_from(const std::map<VertexId, Point> &positions) const {
    Coordinates x(dimension());
    for (std::size_t i = 0; i < pinned_.movable.size(); ++i) {
      auto it = positions.find(pinned_.movable[i]);
      if (it == positions.end()) throw InputError("missing position for " + pinned_.movable[i]);
      x.segment<2>(2 * static_cast<Eigen::Index>(i)) = it->second;
    }
    return x;
  }

  static double half_sq(const Coordinates &x, const PairTerm &t) {
    return 0.5 * (position(x, t.a) - position(x, t.b)).squaredNorm();
  }

  /// Adds the gradient of a half squared distance into `row`.
  template <typename Row>
  static void gradient_into(const Coordinates &x, const PairTerm &t, Row &&row) {
    const Point d = position(x, t.a) - position(x, t.b);
    if (t.a.slot >= 0) row.template segment<2>(2 * t.a.slot) += d.transpose();
    if (t.b.slot >= 0) row.template segment<2>(2 * t.b.slot) -= d.transpose();
  }

private:
  PinnedSpec pinned_;
  std::map<VertexId, int> slots_;
  std::vector<PairTerm> bars_;
  std::vector<PairTerm> diagonals_;
  std::vector<std::size_t> bar_edges_;
  double max_length_sq_ = 0.0;
};

struct ConstraintValues {
  Eigen::VectorXd bars;
  Eigen::VectorXd diagonals;
};

inline void check_dimension(const ConstraintSystem &system, const Coordinates &x) {
  if (static_cast<std::size_t>(x.size()) != system.dimension())
    throw InputError("coordinate vector has length " + std::to_string(x.size()) + ", expected " +
                     std::to_string(system.dimension()));
}

inline ConstraintValues evaluate_constraints(const ConstraintSystem &system, const Coordinates &x) {
  check_dimension(system, x);
  ConstraintValues out;
  out.bars.resize(static_cast<Eigen::Index>(system.bar_count()));
  out.diagonals.resize(static_cast<Eigen::Index>(system.diagonal_count()));
  for (std::size_t i = 0; i < system.bar_count(); ++i)
    out.bars[static_cast<Eigen::Index>(i)] = ConstraintSystem::half_sq(x, system.bars()[i]);
  for (std::size_t i = 0; i < system.diagonal_count(); ++i)
    out.diagonals[static_cast<Eigen::Index>(i)] = ConstraintSystem::half_sq(x, system.diagonals()[i]);
  return out;
}

/// Gradients of the bar functions, then of the diagonal functions.
inline Eigen::MatrixXd constraint_jacobian(const ConstraintSystem &system, const Coordinates &x,
                                           bool include_diagonals = true) {
  check_dimension(system, x);
  const auto q = static_cast<Eigen::Index>(system.bar_count());
  const auto d = include_diagonals ? static_cast<Eigen::Index>(system.diagonal_count()) : 0;
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(q + d, static_cast<Eigen::Index>(system.dimension()));
  for (Eigen::Index i = 0; i < q; ++i)
    ConstraintSystem::gradient_into(x, system.bars()[static_cast<std::size_t>(i)], j.row(i));
  for (Eigen::Index i = 0; i < d; ++i)
    ConstraintSystem::gradient_into(x, system.diagonals()[static_cast<std::size_t>(i)], j.row(q + i));
  return j;
}

/// Max |mu_i - l_i^2/2| over bars.
inline double constraint_residual(const ConstraintSystem &system, const Coordinates &x) {
  if (system.bar_count() == 0) return 0.0;
  return (evaluate_constraints(system, x).bars - system.targets()).cwiseAbs().maxCoeff();
}

/// Number of singular values above `relative` times the largest.
inline int numerical_rank(const Eigen::MatrixXd &m, double relative = 1e-8) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto &s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > relative * s[0]) ++rank;
  return rank;
}

struct SolverOptions {
  double converge_tol = 1e-12; ///< relative to residual_scale()
  double accept_tol = 1e-10;   ///< relative to residual_scale()
  int max_halvings = 30;
};

struct Realization {
  Coordinates coordinates;
  std::map<VertexId, Point> assignment;
  double residual = 0.0;
  int iterations = 0;
};

namespace detail {

inline bool all_finite(const Coordinates &x) { return x.allFinite(); }

struct GaussNewtonResult {
  Coordinates x;
  double residual;
  int iterations;
};

/// Damped Gauss-Newton with minimum-norm steps on mu(x) - target.
inline GaussNewtonResult gauss_newton(const ConstraintSystem &system, Coordinates x, int max_iter,
                                      const SolverOptions &opts) {
  check_dimension(system, x);
  if (!all_finite(x)) throw NumericalError("numerical blow-up");
  const double scale = system.residual_scale();
  const Eigen::VectorXd target = system.targets();
  auto residual_vec = [&](const Coordinates &p) { return Eigen::VectorXd(evaluate_constraints(system, p).bars - target); };

  Eigen::VectorXd r = residual_vec(x);
  double merit = r.squaredNorm();
  double best = r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
  int iter = 0;
  while (best > opts.converge_tol * scale && iter < max_iter) {
    ++iter;
    const Eigen::MatrixXd j = constraint_jacobian(system, x, false);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(j, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-12);
    const Eigen::VectorXd step = -svd.solve(r);
    if (!step.allFinite()) throw NumericalError("numerical blow-up", best);

    double alpha = 1.0;
    bool accepted = false;
    for (int h = 0; h <= opts.max_halvings; ++h, alpha *= 0.5) {
      Coordinates trial = x + alpha * step;
      Eigen::VectorXd rt = residual_vec(trial);
      if (!rt.allFinite()) throw NumericalError("numerical blow-up", best);
      const double mt = rt.squaredNorm();
      if (mt < merit) {
        x = std::move(trial);
        r = std::move(rt);
        merit = mt;
        accepted = true;
        break;
      }
    }
    best = r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
    if (!accepted) break;
  }
  return {std::move(x), best, iter};
}

} // namespace detail

/// Solves mu(x) = l^2/2 from `initial`. Which reflected component is reached
/// depends on the basin of the initial guess.
inline Realization solve_realization(const ConstraintSystem &system, const Coordinates &initial,
                                     int max_iter = 100, const SolverOptions &opts = {}) {
  auto gn = detail::gauss_newton(system, initial, max_iter, opts);
  if (gn.residual > opts.accept_tol * system.residual_scale())
    throw NumericalError("solver did not converge (best residual " + std::to_string(gn.residual) + ")",
                         gn.residual);
  Realization out;
  out.assignment = system.positions(gn.x);
  out.coordinates = std::move(gn.x);
  out.residual = gn.residual;
  out.iterations = gn.iterations;
  return out;
}

/// Retraction onto the constraint manifold. Steps are minimum-norm, so the
/// correction is normal to the level set to first order.
inline Coordinates project(const ConstraintSystem &system, const Coordinates &point, int max_iter = 50,
                           const SolverOptions &opts = {}) {
  auto gn = detail::gauss_newton(system, point, max_iter, opts);
  if (gn.residual > opts.accept_tol * system.residual_scale())
    throw NumericalError("projection did not converge (best residual " + std::to_string(gn.residual) + ")",
                         gn.residual);
  return std::move(gn.x);
}

/// Orthonormal basis (columns) of the kernel of the bar rows, plus diagonal
/// rows if requested.
inline Eigen::MatrixXd tangent_basis(const ConstraintSystem &system, const Coordinates &x,
                                     bool include_diagonals = false) {
  const Eigen::MatrixXd j = constraint_jacobian(system, x, include_diagonals);
  const auto dim = static_cast<Eigen::Index>(system.dimension());
  if (j.rows() == 0) return Eigen::MatrixXd::Identity(dim, dim);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(j, Eigen::ComputeFullV);
  const int rank = numerical_rank(j);
  if (rank < j.rows())
    throw NumericalError("singular configuration (corank " + std::to_string(j.rows() - rank) + ")");
  return svd.matrixV().rightCols(dim - rank);
}

/// Random restarts of solve_realization from a box of side 2 * (sum of
/// lengths) centred on the base centroid.
inline Realization random_feasible(const ConstraintSystem &system, std::uint64_t seed, int attempts = 50,
                                   int max_iter = 200) {
  const auto &spec = system.spec();
  double total = 0.0;
  for (const auto &e : spec.edges) total += e.length;
  if (total == 0.0) total = 1.0;
  Point centre = Point::Zero();
  for (const auto &b : spec.base) centre += b.position;
  if (!spec.base.empty()) centre /= static_cast<double>(spec.base.size());

  for (int a = 0; a < attempts; ++a) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(a)));
    Coordinates x(system.dimension());
    for (Eigen::Index i = 0; i < x.size(); ++i)
      x[i] = centre[i % 2] + rng.uniform(-total, total);
    try {
      return solve_realization(system, x, max_iter);
    } catch (const NumericalError &) {
    }
  }
  throw NumericalError("no realization found");
}

} // namespace linkage

#endif // LINKAGE_GEOMETRY_HPP

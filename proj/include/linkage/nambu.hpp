#ifndef LINKAGE_NAMBU_HPP
#define LINKAGE_NAMBU_HPP

#include "linkage/geometry.hpp"

#include <Eigen/LU>

#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

namespace linkage {

/// Canonical contravariant volume of a pinned linkage, contracted with the
/// differentials of its bars (in `edge_ordering`) and of a subset of its
/// marked diagonals.
///
/// With 2n - 1 stacked rows the contraction is a vector field (the Nambu
/// field); with 2n rows it is a scalar. Reordering rows by a permutation
/// multiplies both by the permutation's sign.
class NambuField {
public:
  /// Uses every marked diagonal and the identity bar ordering.
  explicit NambuField(ConstraintSystem system) : system_(std::move(system)) {
    diagonals_.resize(system_.diagonal_count());
    std::iota(diagonals_.begin(), diagonals_.end(), std::size_t{0});
    ordering_.resize(system_.bar_count());
    std::iota(ordering_.begin(), ordering_.end(), std::size_t{0});
  }

  NambuField(ConstraintSystem system, std::vector<std::size_t> diagonal_subset,
             std::optional<std::vector<std::size_t>> edge_ordering = std::nullopt)
      : system_(std::move(system)), diagonals_(std::move(diagonal_subset)) {
    for (auto d : diagonals_)
      if (d >= system_.diagonal_count()) throw InputError("diagonal subset index out of range");
    if (edge_ordering) {
      ordering_ = std::move(*edge_ordering);
      std::vector<std::size_t> sorted = ordering_;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t i = 0; i < sorted.size(); ++i)
        if (sorted[i] != i || sorted.size() != system_.bar_count())
          throw InputError("edge ordering is not a permutation of the bars");
    } else {
      ordering_.resize(system_.bar_count());
      std::iota(ordering_.begin(), ordering_.end(), std::size_t{0});
    }
  }

  const ConstraintSystem &system() const { return system_; }
  const std::vector<std::size_t> &diagonal_subset() const { return diagonals_; }
  const std::vector<std::size_t> &edge_ordering() const { return ordering_; }

  std::size_t row_count() const { return ordering_.size() + diagonals_.size(); }

  /// Bar gradients in edge order, then the selected diagonal gradients.
  Eigen::MatrixXd stacked(const Coordinates &x) const {
    const Eigen::MatrixXd j = constraint_jacobian(system_, x, true);
    const auto q = static_cast<Eigen::Index>(system_.bar_count());
    Eigen::MatrixXd m(static_cast<Eigen::Index>(row_count()), j.cols());
    Eigen::Index r = 0;
    for (auto i : ordering_) m.row(r++) = j.row(static_cast<Eigen::Index>(i));
    for (auto d : diagonals_) m.row(r++) = j.row(q + static_cast<Eigen::Index>(d));
    return m;
  }

private:
  ConstraintSystem system_;
  std::vector<std::size_t> diagonals_;
  std::vector<std::size_t> ordering_;
};

namespace detail {

inline double determinant(const Eigen::MatrixXd &m) {
  if (m.rows() == 0) return 1.0;
  return Eigen::PartialPivLU<Eigen::MatrixXd>(m).determinant();
}

inline Eigen::MatrixXd drop_column(const Eigen::MatrixXd &m, Eigen::Index col) {
  Eigen::MatrixXd out(m.rows(), m.cols() - 1);
  out.leftCols(col) = m.leftCols(col);
  out.rightCols(m.cols() - col - 1) = m.rightCols(m.cols() - col - 1);
  return out;
}

} // namespace detail

/// Component j (1-based) is (-1)^(j+1) times the minor of the stacked
/// Jacobian with column j removed. Vanishes at singular configurations.
inline Coordinates evaluate_field(const NambuField &field, const Coordinates &x) {
  const auto dim = static_cast<Eigen::Index>(field.system().dimension());
  if (dim == 0 || static_cast<Eigen::Index>(field.row_count()) != dim - 1)
    throw InputError("not a 1DOF Nambu configuration: " + std::to_string(field.row_count()) +
                     " rows for " + std::to_string(dim) + " coordinates");
  const Eigen::MatrixXd m = field.stacked(x);
  Coordinates v(dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const double minor = detail::determinant(detail::drop_column(m, j));
    v[j] = (j % 2 == 0) ? minor : -minor;
  }
  return v;
}

/// Full contraction in the rigid case: det of the square stacked Jacobian.
inline double evaluate_scalar(const NambuField &field, const Coordinates &x) {
  const auto dim = static_cast<Eigen::Index>(field.system().dimension());
  if (static_cast<Eigen::Index>(field.row_count()) != dim)
    throw InputError("not a rigid configuration: " + std::to_string(field.row_count()) + " rows for " +
                     std::to_string(dim) + " coordinates");
  return detail::determinant(field.stacked(x));
}

/// Pairs the snake's orbit-space volume with d(theta_1) ^ ... ^ d(theta_k),
/// where theta_i is the direction of bar i. The result is +-1 whatever the
/// lengths and angles.
inline double snake_volume_check(int k, const std::vector<double> &lengths,
                                 std::optional<std::vector<double>> angles = std::nullopt) {
  if (k < 1 || static_cast<int>(lengths.size()) != k)
    throw InputError("snake needs k >= 1 and k lengths");
  std::vector<double> theta;
  if (angles) {
    if (static_cast<int>(angles->size()) != k) throw InputError("snake needs k angles");
    theta = *angles;
  } else {
    for (int i = 0; i < k; ++i) theta.push_back(0.3 + 0.7 * i);
  }

  LinkageSpec spec;
  spec.vertices.push_back("A0");
  spec.base.push_back({"A0", Point::Zero()});
  std::vector<Point> pos{Point::Zero()};
  for (int i = 1; i <= k; ++i) {
    const double c = lengths[static_cast<std::size_t>(i - 1)];
    if (!(c > 0.0)) throw InputError("snake lengths must be positive");
    const std::string v = "A" + std::to_string(i);
    spec.vertices.push_back(v);
    spec.edges.push_back({"A" + std::to_string(i - 1), v, c});
    const double t = theta[static_cast<std::size_t>(i - 1)];
    pos.push_back(pos.back() + c * Point(std::cos(t), std::sin(t)));
  }
  // A second base vertex far away keeps the system pinned without touching
  // the snake: the orbit space is the one of the one-base snake.
  spec.vertices.push_back("far");
  spec.base.push_back({"far", Point(1e6, 0.0)});

  const ConstraintSystem system(pin(spec));
  Coordinates x(system.dimension());
  for (int i = 1; i <= k; ++i) x.segment<2>(2 * (i - 1)) = pos[static_cast<std::size_t>(i)];

  const auto dim = static_cast<Eigen::Index>(2 * k);
  Eigen::MatrixXd m(dim, dim);
  m.topRows(k) = constraint_jacobian(system, x, false);
  m.bottomRows(k).setZero();
  for (int i = 0; i < k; ++i) {
    const Point u = pos[static_cast<std::size_t>(i + 1)] - pos[static_cast<std::size_t>(i)];
    const Eigen::RowVector2d dtheta = perp(u).transpose() / u.squaredNorm();
    m.block<1, 2>(k + i, 2 * i) += dtheta;
    if (i > 0) m.block<1, 2>(k + i, 2 * (i - 1)) -= dtheta;
  }
  return detail::determinant(m);
}

} // namespace linkage

#endif // LINKAGE_NAMBU_HPP

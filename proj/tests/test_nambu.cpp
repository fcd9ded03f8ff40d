#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace linkage;
using namespace testing_support;

namespace {

LinkageSpec four_bar() {
  LinkageSpec s;
  s.vertices = {"A", "B", "C", "D"};
  s.base = {{"A", Point(0, 0)}, {"B", Point(3, 0)}};
  s.edges = {{"B", "C", 2.5}, {"C", "D", 2.0}, {"D", "A", 1.5}};
  return s;
}

/// Angular speed of the bar from `a` to `b` under velocity v.
double angular_speed(const Point &a, const Point &b, const Point &va, const Point &vb) {
  const Point r = b - a;
  return cross(r, vb - va) / r.squaredNorm();
}

} // namespace

TEST(EvaluateField, PendantTriangleTurnsAtTwiceTheArea) {
  const ConstraintSystem s(pin(catalog::pinned_triangle(true)));
  const NambuField f(s);
  Coordinates x(4);
  x << 0, 4, 1, 4; // C, D
  const Coordinates v = evaluate_field(f, x);
  EXPECT_LE(v.head<2>().norm(), 1e-12); // C cannot move
  const double omega = angular_speed(Point(0, 4), Point(1, 4), v.head<2>(), v.tail<2>());
  EXPECT_NEAR(std::abs(omega), 12.0, 1e-9);
  // any position of D on its circle gives the same speed
  for (double t : {0.3, 1.9, 4.4}) {
    x.tail<2>() = Point(0, 4) + Point(std::cos(t), std::sin(t));
    const Coordinates w = evaluate_field(f, x);
    EXPECT_NEAR(std::abs(angular_speed(Point(0, 4), x.tail<2>(), w.head<2>(), w.tail<2>())), 12.0, 1e-9);
  }
}

TEST(EvaluateField, CollinearTriangleGivesZero) {
  LinkageSpec s = catalog::pinned_triangle(true);
  s.edges[0].length = 4.0; // CA
  s.edges[1].length = 1.0; // CB, so C = (4, 0) on the line AB
  const ConstraintSystem sys(pin(s));
  Coordinates x(4);
  x << 4, 0, 4.6, 0.8;
  const Coordinates v = evaluate_field(NambuField(sys), x);
  EXPECT_EQ(v, Coordinates::Zero(4));
}

TEST(EvaluateField, TangentToEveryStackedRow) {
  for (const auto &spec : {four_bar(), catalog::quadrangle()}) {
    const ConstraintSystem s(pin(spec));
    const NambuField f(s);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Coordinates x = random_feasible(s, seed).coordinates;
      const Coordinates v = evaluate_field(f, x);
      const Eigen::MatrixXd rows = f.stacked(x);
      for (Eigen::Index i = 0; i < rows.rows(); ++i)
        EXPECT_LE(std::abs(rows.row(i).dot(v)), 1e-9 * rows.row(i).norm() * v.norm());
    }
  }
}

TEST(EvaluateField, TangentWithMarkedDiagonal) {
  const auto hex = catalog::hexagon();
  const ConstraintSystem piece = piece_system(hex.spec, *hex.decomposition, 0);
  const NambuField f(piece);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Coordinates x = random_feasible(piece, seed).coordinates;
    const Coordinates v = evaluate_field(f, x);
    const Eigen::MatrixXd rows = f.stacked(x);
    EXPECT_LE((rows * v).cwiseAbs().maxCoeff(), 1e-9 * rows.norm() * v.norm());
  }
}

TEST(EvaluateField, CountMismatch) {
  const ConstraintSystem s(pin(catalog::hexagon().spec));
  try {
    evaluate_field(NambuField(s, {}), random_feasible(s, 1).coordinates);
    FAIL();
  } catch (const InputError &e) {
    EXPECT_TRUE(contains_text(e.what(), "not a 1DOF Nambu configuration"));
  }
  EXPECT_THROW(evaluate_scalar(NambuField(s), random_feasible(s, 1).coordinates), InputError);
}

TEST(EvaluateField, OrderingMustBeAPermutation) {
  const ConstraintSystem s(pin(four_bar()));
  EXPECT_THROW(NambuField(s, {}, std::vector<std::size_t>{0, 0, 1}), InputError);
  EXPECT_THROW(NambuField(s, {}, std::vector<std::size_t>{0, 1}), InputError);
  EXPECT_THROW(NambuField(s, {3}), InputError);
}

TEST(EvaluateField, TranspositionNegates) {
  const ConstraintSystem s(pin(four_bar()));
  const NambuField id(s);
  const NambuField swapped(s, {}, std::vector<std::size_t>{1, 0, 2});
  const NambuField cycled(s, {}, std::vector<std::size_t>{1, 2, 0}); // even
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Coordinates x = random_feasible(s, seed).coordinates;
    EXPECT_LE((evaluate_field(id, x) + evaluate_field(swapped, x)).norm(), 1e-12);
    EXPECT_LE((evaluate_field(id, x) - evaluate_field(cycled, x)).norm(), 1e-12);
  }
  const ConstraintSystem tri(pin(catalog::pinned_triangle()));
  const Coordinates c = Eigen::Vector2d(0, 4);
  EXPECT_DOUBLE_EQ(evaluate_scalar(NambuField(tri), c),
                   -evaluate_scalar(NambuField(tri, {}, std::vector<std::size_t>{1, 0}), c));
}

TEST(EvaluateField, DiagonalAsBarAgreesUpToSign) {
  const auto hex = catalog::hexagon();
  const auto sub = induced_spec(hex.spec, hex.decomposition->pieces[0]);
  const ConstraintSystem marked(pin(sub));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto r = random_feasible(marked, seed);
    const double d = (r.assignment.at("A1") - r.assignment.at("A4")).norm();
    const ConstraintSystem fixed(pin(add_diagonal_bar(sub, 0, d)));
    const Coordinates x = fixed.coordinates_from(r.assignment);
    const Coordinates a = evaluate_field(NambuField(marked), r.coordinates);
    const Coordinates b = evaluate_field(NambuField(fixed), x);
    EXPECT_LE(std::min((a - b).norm(), (a + b).norm()), 1e-9 * a.norm());
  }
}

TEST(EvaluateScalar, RigidTriangle) {
  const ConstraintSystem tri(pin(catalog::pinned_triangle()));
  EXPECT_NEAR(std::abs(evaluate_scalar(NambuField(tri), Eigen::Vector2d(0, 4))), 12.0, 1e-12);
  EXPECT_NEAR(std::abs(evaluate_scalar(NambuField(tri), Eigen::Vector2d(0, -4))), 12.0, 1e-12);

  auto collinear = catalog::pinned_triangle();
  collinear.edges[1].length = 1.0;
  const ConstraintSystem flat(pin(collinear));
  EXPECT_EQ(evaluate_scalar(NambuField(flat), Eigen::Vector2d(4, 0)), 0.0);

  const ConstraintSystem doubled(pin(scale(catalog::pinned_triangle(), 2.0)));
  EXPECT_NEAR(std::abs(evaluate_scalar(NambuField(doubled), Eigen::Vector2d(0, 8))), 48.0, 1e-12);
}

TEST(Homothety, FieldAndScalarScaleWithExponent) {
  const auto quad = catalog::quadrangle();
  const int eq = homothety_law(quad).exponent;
  const ConstraintSystem qs(pin(quad));
  const auto triangle = catalog::polygon({3.0, 4.0, 5.0});
  const int et = homothety_law(triangle).exponent;
  const ConstraintSystem ts(pin(triangle));
  for (double c : {0.5, 2.0, 3.0}) {
    const ConstraintSystem qc(pin(scale(quad, c)));
    const Coordinates x = random_feasible(qs, 9).coordinates;
    const Coordinates expect = std::pow(c, eq) * c * evaluate_field(NambuField(qs), x);
    const Coordinates got = evaluate_field(NambuField(qc), c * x);
    EXPECT_LE((got - expect).norm(), 1e-8 * expect.norm());

    const ConstraintSystem tc(pin(scale(triangle, c)));
    const Coordinates y = random_feasible(ts, 9).coordinates;
    const double s0 = evaluate_scalar(NambuField(ts), y);
    EXPECT_NEAR(evaluate_scalar(NambuField(tc), c * y), std::pow(c, et) * s0, 1e-8 * std::abs(s0) * std::pow(c, et));
  }
}

TEST(SnakeVolume, UnitForAnyLengths) {
  EXPECT_NEAR(std::abs(snake_volume_check(1, {1.0})), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(snake_volume_check(3, {1.0, 2.5, 0.3})), 1.0, 1e-9);
  const double a = snake_volume_check(2, {1.0, 1.0}, std::vector<double>{0.2, 2.9});
  const double b = snake_volume_check(2, {1.0, 1.0}, std::vector<double>{-1.4, 0.7});
  EXPECT_NEAR(std::abs(a), 1.0, 1e-12);
  EXPECT_NEAR(a, b, 1e-12);
  EXPECT_THROW(snake_volume_check(0, {}), InputError);
  EXPECT_THROW(snake_volume_check(2, {1.0, -1.0}), InputError);
}

#ifndef LINKAGE_FLOWS_HPP
#define LINKAGE_FLOWS_HPP

#include "linkage/decomposition.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace linkage {

using FieldEvaluator = std::function<Coordinates(const Coordinates &)>;

inline FieldEvaluator as_evaluator(NambuField field) {
  return [f = std::move(field)](const Coordinates &x) { return evaluate_field(f, x); };
}

inline FieldEvaluator as_evaluator(LiftedField field) {
  return [f = std::move(field)](const Coordinates &x) { return lifted_field_evaluate(f, x); };
}

struct FlowState {
  double time = 0.0;
  Coordinates point;
  double residual = 0.0;
  Eigen::VectorXd integrals; ///< half squared lengths of the marked diagonals
};

struct Trajectory {
  std::vector<FlowState> states;
  /// Integration stopped at a point where the field vanishes.
  bool halted_singular = false;

  const FlowState &back() const { return states.back(); }
};

/// Field norm below which a point is treated as an equilibrium.
inline constexpr double kSingularFieldNorm = 1e-12;

/// One classical Runge-Kutta step followed by projection onto the manifold.
inline Coordinates rk4_step(const FieldEvaluator &field, const ConstraintSystem &system, const Coordinates &x,
                            double h) {
  const Coordinates k1 = field(x);
  const Coordinates k2 = field(x + 0.5 * h * k1);
  const Coordinates k3 = field(x + 0.5 * h * k2);
  const Coordinates k4 = field(x + h * k3);
  Coordinates next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!next.allFinite()) throw NumericalError("numerical blow-up during integration");
  return project(system, next);
}

inline FlowState make_state(const ConstraintSystem &system, double time, Coordinates x) {
  FlowState s;
  s.time = time;
  s.residual = constraint_residual(system, x);
  s.integrals = evaluate_constraints(system, x).diagonals;
  s.point = std::move(x);
  return s;
}

/// Fixed-step RK4 + projection from x0 over time t (either sign). One state
/// per step.
inline Trajectory integrate(const FieldEvaluator &field, const ConstraintSystem &system, const Coordinates &x0,
                            double t, double dt) {
  if (!(dt > 0.0)) throw InputError("dt must be positive");
  Trajectory traj;
  traj.states.push_back(make_state(system, 0.0, x0));
  if (t == 0.0) return traj;
  const auto steps = static_cast<long>(std::max(1.0, std::ceil(std::abs(t) / dt - 1e-9)));
  const double h = t / static_cast<double>(steps);
  Coordinates x = x0;
  for (long i = 1; i <= steps; ++i) {
    if (field(x).norm() < kSingularFieldNorm) {
      traj.halted_singular = true;
      break;
    }
    x = rk4_step(field, system, x, h);
    traj.states.push_back(make_state(system, h * static_cast<double>(i), x));
  }
  return traj;
}

/// |Phi_A^s Phi_B^t (x0) - Phi_B^t Phi_A^s (x0)|.
inline double commutation_defect(const FieldEvaluator &a, const FieldEvaluator &b, const ConstraintSystem &system,
                                 const Coordinates &x0, double s, double t, double dt) {
  const Coordinates ab = integrate(a, system, integrate(b, system, x0, t, dt).back().point, s, dt).back().point;
  const Coordinates ba = integrate(b, system, integrate(a, system, x0, s, dt).back().point, t, dt).back().point;
  return (ab - ba).norm();
}

/// Central-difference [A, B](x) = DB.A - DA.B. Each directional derivative
/// is taken along the unit direction with step h and rescaled.
inline Coordinates lie_bracket_fd(const FieldEvaluator &a, const FieldEvaluator &b, const ConstraintSystem &system,
                                  const Coordinates &x, double h = 1e-4) {
  check_dimension(system, x);
  auto directional = [&](const FieldEvaluator &f, const Coordinates &dir) -> Coordinates {
    const double n = dir.norm();
    if (n == 0.0) return Coordinates::Zero(x.size());
    const Coordinates u = dir / n;
    return n * (f(x + h * u) - f(x - h * u)) / (2.0 * h);
  };
  return directional(b, a(x)) - directional(a, b(x));
}

/// Worst deviation of any marked-diagonal integral from its initial value.
inline double integral_drift(const FieldEvaluator &field, const ConstraintSystem &system, const Coordinates &x0,
                             double t, double dt) {
  const Trajectory traj = integrate(field, system, x0, t, dt);
  const auto &f0 = traj.states.front().integrals;
  double worst = 0.0;
  for (const auto &s : traj.states)
    if (f0.size()) worst = std::max(worst, (s.integrals - f0).cwiseAbs().maxCoeff());
  return worst;
}

struct OrbitClosure {
  bool found = false;
  double period = 0.0;
  double gap = 0.0; ///< |x(period) - x0|
};

/// First return of a periodic orbit to x0, refined between steps by bisection
/// on d/dt |x(t) - x0|^2.
inline OrbitClosure return_time(const FieldEvaluator &field, const ConstraintSystem &system, const Coordinates &x0,
                                double dt, double t_max) {
  OrbitClosure out;
  const double speed = field(x0).norm();
  if (speed < kSingularFieldNorm) return out;
  const double leave = 50.0 * speed * dt;
  auto approach = [&](const Coordinates &x) { return (x - x0).dot(field(x)); };

  Coordinates prev = x0;
  double t = 0.0;
  bool left = false;
  while (t < t_max) {
    Coordinates next = rk4_step(field, system, prev, dt);
    if ((next - x0).norm() > leave) left = true;
    if (left && approach(prev) < 0.0 && approach(next) >= 0.0) {
      double lo = 0.0, hi = dt;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (approach(rk4_step(field, system, prev, mid)) < 0.0) lo = mid;
        else hi = mid;
      }
      const double tau = 0.5 * (lo + hi);
      out.found = true;
      out.period = t + tau;
      out.gap = (rk4_step(field, system, prev, tau) - x0).norm();
      return out;
    }
    prev = std::move(next);
    t += dt;
  }
  return out;
}

/// CSV with header "time,residual,F_1..F_k,x_1,y_1,..." and 17 significant
/// digits per value.
inline void write_trajectory_csv(std::ostream &os, const Trajectory &traj) {
  if (traj.states.empty()) return;
  const auto k = traj.states.front().integrals.size();
  const auto n = traj.states.front().point.size() / 2;
  os << "time,residual";
  for (Eigen::Index i = 1; i <= k; ++i) os << ",F_" << i;
  for (Eigen::Index i = 1; i <= n; ++i) os << ",x_" << i << ",y_" << i;
  os << '\n';
  char buf[40];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (const auto &s : traj.states) {
    put(s.time);
    os << ',';
    put(s.residual);
    for (Eigen::Index i = 0; i < s.integrals.size(); ++i) {
      os << ',';
      put(s.integrals[i]);
    }
    for (Eigen::Index i = 0; i < s.point.size(); ++i) {
      os << ',';
      put(s.point[i]);
    }
    os << '\n';
  }
}

} // namespace linkage

#endif // LINKAGE_FLOWS_HPP

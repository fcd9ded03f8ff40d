#ifndef LINKAGE_MORSE_HPP
#define LINKAGE_MORSE_HPP

#include "linkage/geometry.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace linkage {

/// Critical values of the diagonal length d = |A1A4| on a hexagon space.
struct CriticalValueReport {
  double max_value = 0.0;
  std::vector<double> saddle_values;
  double min_value = 0.0;
  std::vector<std::string> warnings;
};

enum class HexagonLabeling {
  Sorted,  ///< sort the lengths first (the labelling the formulas assume)
  AsGiven, ///< apply the formulas to l1..l6 in the order given
};

namespace detail {

inline std::array<double, 6> hexagon_lengths(const std::array<double, 6> &lengths, HexagonLabeling labeling) {
  for (double l : lengths)
    if (!(l > 0.0)) throw InputError("hexagon lengths must be positive");
  auto l = lengths;
  if (labeling == HexagonLabeling::Sorted) std::sort(l.begin(), l.end());
  const double total = l[0] + l[1] + l[2] + l[3] + l[4] + l[5];
  const double longest = *std::max_element(l.begin(), l.end());
  if (longest > total - longest) throw NumericalError("infeasible hexagon: no realization exists");
  return l;
}

/// [min, max] endpoint distance of a three-bar chain.
inline std::pair<double, double> chain_range(double a, double b, double c) {
  const double s = a + b + c;
  return {std::max(0.0, 2.0 * std::max({a, b, c}) - s), s};
}

} // namespace detail

/// Listed critical values: the stretched and folded chains A1A2A3A4 and
/// A4A5A6A1 plus the minimum.
inline CriticalValueReport hexagon_critical_values(const std::array<double, 6> &lengths,
                                                   HexagonLabeling labeling = HexagonLabeling::Sorted) {
  const auto l = detail::hexagon_lengths(lengths, labeling);
  CriticalValueReport r;
  r.max_value = l[0] + l[1] + l[2];
  const double fold1 = l[0] + l[1] - l[2];
  const double fold2 = l[3] + l[4] - l[5];
  if (fold1 > 0.0) r.saddle_values.push_back(fold1);
  r.saddle_values.push_back(l[2] + l[1] - l[0]);
  r.saddle_values.push_back(l[2] + l[0] - l[1]);
  if (fold2 > 0.0) r.saddle_values.push_back(fold2);
  r.saddle_values.push_back(l[5] + l[4] - l[3]);
  r.saddle_values.push_back(l[5] + l[3] - l[4]);
  r.min_value = (fold1 > 0.0 && fold2 > 0.0) ? 0.0 : std::max(l[2] - l[0] - l[1], l[5] - l[3] - l[4]);

  std::vector<double> all = r.saddle_values;
  all.push_back(r.max_value);
  all.push_back(r.min_value);
  std::sort(all.begin(), all.end());
  for (std::size_t i = 1; i < all.size(); ++i)
    if (all[i] - all[i - 1] <= 1e-9 * (1.0 + all[i]))
      r.warnings.push_back("non-generic lengths: critical value " + std::to_string(all[i]) + " repeats");
  if (fold1 == 0.0 || fold2 == 0.0) r.warnings.push_back("non-generic lengths: a folded chain closes exactly");
  for (double v : r.saddle_values)
    if (v > r.max_value)
      r.warnings.push_back("saddle value " + std::to_string(v) + " exceeds the maximum and is never attained");
  return r;
}

/// The listed values that some configuration actually attains: a stretched
/// or folded chain value needs the opposite chain to reach that distance.
inline std::vector<double> hexagon_feasible_critical_values(const std::array<double, 6> &lengths,
                                                            HexagonLabeling labeling = HexagonLabeling::Sorted) {
  const auto l = detail::hexagon_lengths(lengths, labeling);
  const auto r = hexagon_critical_values(lengths, labeling);
  const auto [lo1, hi1] = detail::chain_range(l[0], l[1], l[2]);
  const auto [lo2, hi2] = detail::chain_range(l[3], l[4], l[5]);
  auto in = [](double v, double lo, double hi) { return v >= lo - 1e-12 && v <= hi + 1e-12; };

  std::vector<double> out{r.min_value};
  if (in(r.max_value, lo2, hi2)) out.push_back(r.max_value);
  const double chain1[] = {l[0] + l[1] - l[2], l[2] + l[1] - l[0], l[2] + l[0] - l[1]};
  const double chain2[] = {l[3] + l[4] - l[5], l[5] + l[4] - l[3], l[5] + l[3] - l[4]};
  for (double v : chain1)
    if (v > 0.0 && in(v, lo2, hi2)) out.push_back(v);
  for (double v : chain2)
    if (v > 0.0 && in(v, lo1, hi1)) out.push_back(v);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(), [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
            out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Numerical critical points of nu = d^2 / 2 on the constraint manifold.

struct CriticalPoint {
  double value = 0.0;         ///< diagonal length d
  double gradient_norm = 0.0; ///< projected gradient norm of nu
  int index = 0;              ///< negative transversal Hessian eigenvalues
  int multiplicity = 0;       ///< converged starts in this cluster
  Coordinates point;          ///< one representative
};

struct CriticalSearchOptions {
  int max_newton = 100;
  double gradient_tol = 1e-8;
  double cluster_tol = 1e-6; ///< in nu
  double index_threshold = 1e-6;
};

/// Value, gradient and Hessian of a half squared distance.
class PairFunction {
public:
  PairFunction(const ConstraintSystem &system, const VertexPair &pair)
      : term_{system.endpoint(pair.a), system.endpoint(pair.b), 0.0},
        dim_(static_cast<Eigen::Index>(system.dimension())) {}

  double value(const Coordinates &x) const { return ConstraintSystem::half_sq(x, term_); }

  Eigen::VectorXd gradient(const Coordinates &x) const {
    Eigen::RowVectorXd g = Eigen::RowVectorXd::Zero(dim_);
    ConstraintSystem::gradient_into(x, term_, g);
    return g.transpose();
  }

  static void add_hessian(const PairTerm &t, double weight, Eigen::MatrixXd &h) {
    const Eigen::Matrix2d id = weight * Eigen::Matrix2d::Identity();
    if (t.a.slot >= 0) h.block<2, 2>(2 * t.a.slot, 2 * t.a.slot) += id;
    if (t.b.slot >= 0) h.block<2, 2>(2 * t.b.slot, 2 * t.b.slot) += id;
    if (t.a.slot >= 0 && t.b.slot >= 0) {
      h.block<2, 2>(2 * t.a.slot, 2 * t.b.slot) -= id;
      h.block<2, 2>(2 * t.b.slot, 2 * t.a.slot) -= id;
    }
  }

  const PairTerm &term() const { return term_; }

private:
  PairTerm term_;
  Eigen::Index dim_;
};

/// Reduced gradient and Hessian of nu restricted to the bar manifold at x.
struct ReducedDerivatives {
  Eigen::MatrixXd tangent;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

inline ReducedDerivatives reduced_derivatives(const ConstraintSystem &system, const PairFunction &nu,
                                              const Coordinates &x) {
  ReducedDerivatives out;
  out.tangent = tangent_basis(system, x, false);
  const Eigen::VectorXd g = nu.gradient(x);
  out.gradient = out.tangent.transpose() * g;

  const auto dim = static_cast<Eigen::Index>(system.dimension());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  PairFunction::add_hessian(nu.term(), 1.0, h);
  if (system.bar_count() > 0) {
    const Eigen::MatrixXd j = constraint_jacobian(system, x, false);
    const Eigen::VectorXd lambda = j.transpose().jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(g);
    for (std::size_t i = 0; i < system.bar_count(); ++i)
      PairFunction::add_hessian(system.bars()[i], -lambda[static_cast<Eigen::Index>(i)], h);
  }
  out.hessian = out.tangent.transpose() * h * out.tangent;
  return out;
}

/// Riemannian Newton iteration on the projected gradient; converges to
/// critical points of any index. Returns false if the start is abandoned.
inline bool refine_critical_point(const ConstraintSystem &system, const PairFunction &nu, Coordinates &x,
                                  const CriticalSearchOptions &opts = {}) {
  try {
    auto d = reduced_derivatives(system, nu, x);
    for (int it = 0; it < opts.max_newton; ++it) {
      const double gnorm = d.gradient.norm();
      if (gnorm <= opts.gradient_tol) return true;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(d.hessian);
      const auto &ev = eig.eigenvalues();
      const double big = ev.cwiseAbs().maxCoeff();
      Eigen::VectorXd coeff = eig.eigenvectors().transpose() * d.gradient;
      for (Eigen::Index i = 0; i < ev.size(); ++i)
        coeff[i] = std::abs(ev[i]) > 1e-10 * big ? -coeff[i] / ev[i] : 0.0;
      const Eigen::VectorXd step = d.tangent * (eig.eigenvectors() * coeff);

      bool accepted = false;
      double alpha = 1.0;
      for (int h = 0; h < 30 && !accepted; ++h, alpha *= 0.5) {
        Coordinates trial;
        try {
          trial = project(system, x + alpha * step);
        } catch (const NumericalError &) {
          continue;
        }
        auto dt = reduced_derivatives(system, nu, trial);
        if (dt.gradient.norm() < gnorm) {
          x = std::move(trial);
          d = std::move(dt);
          accepted = true;
        }
      }
      if (!accepted) return false;
    }
    return d.gradient.norm() <= opts.gradient_tol;
  } catch (const NumericalError &) {
    return false;
  }
}

/// Count of transversal Hessian eigenvalues below -threshold.
inline int critical_index(const ConstraintSystem &system, const PairFunction &nu, const Coordinates &x,
                          double threshold = 1e-6) {
  const auto d = reduced_derivatives(system, nu, x);
  if (d.hessian.rows() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(d.hessian);
  int neg = 0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i)
    if (eig.eigenvalues()[i] < -threshold) ++neg;
  return neg;
}

/// Multi-start search for critical points of |diagonal|^2 / 2 restricted to
/// the configuration space of `spec`. Values are clustered in nu and
/// reported as lengths d, ascending.
inline std::vector<CriticalPoint> numeric_critical_values(const LinkageSpec &spec, const VertexPair &diagonal,
                                                          std::uint64_t seed = 42, int starts = 200,
                                                          const CriticalSearchOptions &opts = {}) {
  const ConstraintSystem system(pin(spec));
  const PairFunction nu(system, diagonal);

  // Reject diagonals whose length is locked by the bars.
  bool varies = false;
  bool any_start = false;
  for (int s = 0; s < 5 && !varies; ++s) {
    try {
      const auto r = random_feasible(system, derive_seed(seed, 1000 + static_cast<std::uint64_t>(s)));
      any_start = true;
      const Eigen::VectorXd g = nu.gradient(r.coordinates);
      const Eigen::VectorXd tg = tangent_basis(system, r.coordinates).transpose() * g;
      if (tg.norm() > 1e-7 * (1.0 + g.norm())) varies = true;
    } catch (const NumericalError &) {
    }
  }
  if (!any_start) throw NumericalError("no feasible start found");
  if (!varies) throw InputError("constant function: diagonal length is fixed by the bars");

  struct Hit {
    double nu;
    double gnorm;
    Coordinates x;
  };
  std::vector<Hit> hits;
  for (int s = 0; s < starts; ++s) {
    Coordinates x;
    try {
      x = random_feasible(system, derive_seed(seed, static_cast<std::uint64_t>(s))).coordinates;
    } catch (const NumericalError &) {
      continue;
    }
    if (!refine_critical_point(system, nu, x, opts)) continue;
    const double g = reduced_derivatives(system, nu, x).gradient.norm();
    hits.push_back({nu.value(x), g, std::move(x)});
  }
  std::sort(hits.begin(), hits.end(), [](const Hit &a, const Hit &b) { return a.nu < b.nu; });

  std::vector<CriticalPoint> out;
  double cluster_start = 0.0;
  for (const auto &h : hits) {
    if (out.empty() || h.nu - cluster_start > opts.cluster_tol) {
      CriticalPoint c;
      c.value = std::sqrt(2.0 * std::max(0.0, h.nu));
      c.point = h.x;
      c.index = critical_index(system, nu, h.x, opts.index_threshold);
      out.push_back(std::move(c));
      cluster_start = h.nu;
    }
    out.back().gradient_norm = std::max(out.back().gradient_norm, h.gnorm);
    ++out.back().multiplicity;
  }
  return out;
}

} // namespace linkage

#endif // LINKAGE_MORSE_HPP

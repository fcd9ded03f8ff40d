#ifndef LINKAGE_TESTS_SUPPORT_HPP
#define LINKAGE_TESTS_SUPPORT_HPP

#include "linkage/catalog.hpp"
#include "linkage/linkage.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace testing_support {

using namespace linkage;

inline Coordinates random_point(std::size_t dim, std::uint64_t seed, double box = 3.0) {
  Rng rng(seed);
  Coordinates x(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.uniform(-box, box);
  return x;
}

/// Central-difference Jacobian of bar and diagonal half squared lengths.
inline Eigen::MatrixXd fd_jacobian(const ConstraintSystem &system, const Coordinates &x, double h = 1e-5) {
  const auto q = static_cast<Eigen::Index>(system.bar_count());
  const auto d = static_cast<Eigen::Index>(system.diagonal_count());
  Eigen::MatrixXd j(q + d, x.size());
  for (Eigen::Index c = 0; c < x.size(); ++c) {
    Coordinates xp = x, xm = x;
    xp[c] += h;
    xm[c] -= h;
    const auto fp = evaluate_constraints(system, xp);
    const auto fm = evaluate_constraints(system, xm);
    j.col(c).head(q) = (fp.bars - fm.bars) / (2 * h);
    j.col(c).tail(d) = (fp.diagonals - fm.diagonals) / (2 * h);
  }
  return j;
}

/// Renames every vertex through `f`, keeping edge and diagonal order.
template <typename F> LinkageSpec relabel(const LinkageSpec &spec, F f) {
  LinkageSpec out;
  for (const auto &v : spec.vertices) out.vertices.push_back(f(v));
  for (const auto &e : spec.edges) out.edges.push_back({f(e.a), f(e.b), e.length});
  for (const auto &b : spec.base) out.base.push_back({f(b.vertex), b.position});
  for (const auto &d : spec.diagonals) out.diagonals.push_back({f(d.a), f(d.b)});
  return out;
}

inline bool contains_text(const std::string &hay, const std::string &needle) {
  return hay.find(needle) != std::string::npos;
}

} // namespace testing_support

#endif // LINKAGE_TESTS_SUPPORT_HPP

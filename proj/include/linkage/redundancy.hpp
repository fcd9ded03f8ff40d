#ifndef LINKAGE_REDUNDANCY_HPP
#define LINKAGE_REDUNDANCY_HPP

#include "linkage/geometry.hpp"

#include <cstdint>
#include <vector>

namespace linkage {

/// A bar whose length function depends on the preceding bars.
struct RedundancyCertificate {
  std::size_t bar = 0; ///< index into the pinned spec's edges
  Edge edge;
  int corank = 1;
  /// Bars (edge indices) taking part in the linear dependency at the first
  /// sample, the redundant bar included.
  std::vector<std::size_t> dependency;
};

namespace detail {

inline Eigen::MatrixXd select_rows(const Eigen::MatrixXd &m, const std::vector<Eigen::Index> &rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  return out;
}

} // namespace detail

/// Bars whose gradient lies in the span of the earlier independent bars at
/// every sampled realization. Rows are scanned in edge order, so in a
/// dependent family the last bar is the one reported.
inline std::vector<RedundancyCertificate> detect_redundant_bars(const PinnedSpec &pinned, int samples = 8,
                                                                std::uint64_t seed = 42) {
  const ConstraintSystem system(pinned);
  std::vector<Eigen::MatrixXd> jacobians;
  for (int s = 0; s < samples; ++s) {
    try {
      auto r = random_feasible(system, derive_seed(seed, static_cast<std::uint64_t>(s)));
      jacobians.push_back(constraint_jacobian(system, r.coordinates, false));
    } catch (const NumericalError &) {
    }
  }
  if (jacobians.empty()) throw NumericalError("infeasible lengths");

  std::vector<RedundancyCertificate> out;
  std::vector<Eigen::Index> independent;
  for (Eigen::Index row = 0; row < static_cast<Eigen::Index>(system.bar_count()); ++row) {
    auto trial = independent;
    trial.push_back(row);
    bool increases = false;
    for (const auto &j : jacobians) {
      const Eigen::MatrixXd sub = detail::select_rows(j, trial);
      if (numerical_rank(sub) == sub.rows()) {
        increases = true;
        break;
      }
    }
    if (increases) {
      independent.push_back(row);
      continue;
    }
    RedundancyCertificate cert;
    cert.bar = system.bar_edges()[static_cast<std::size_t>(row)];
    cert.edge = pinned.spec.edges[cert.bar];
    const Eigen::MatrixXd basis = detail::select_rows(jacobians.front(), independent);
    if (basis.rows() > 0) {
      const Eigen::VectorXd coeff =
          basis.transpose().jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV)
              .solve(jacobians.front().row(row).transpose());
      const double big = coeff.cwiseAbs().maxCoeff();
      for (Eigen::Index k = 0; k < coeff.size(); ++k)
        if (std::abs(coeff[k]) > 1e-8 * big)
          cert.dependency.push_back(system.bar_edges()[static_cast<std::size_t>(independent[static_cast<std::size_t>(k)])]);
    }
    cert.dependency.push_back(cert.bar);
    out.push_back(std::move(cert));
  }
  return out;
}

} // namespace linkage

#endif // LINKAGE_REDUNDANCY_HPP

#ifndef LINKAGE_CORE_HPP
#define LINKAGE_CORE_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace linkage {

using Point = Eigen::Vector2d;
using Coordinates = Eigen::VectorXd;
using VertexId = std::string;

/// Malformed or inconsistent input (bad file, invalid spec, wrong counts).
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine failed to reach its tolerance.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string &what, double best_residual = -1.0)
      : std::runtime_error(what), best_residual_(best_residual) {}

  /// Smallest residual reached before giving up; negative if not applicable.
  double best_residual() const noexcept { return best_residual_; }

private:
  double best_residual_;
};

/// Deterministic random source.
///
/// Uniform draws are built from raw 64-bit output so sequences are identical
/// across standard library implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
  std::uint64_t state_;
};

/// Seed for sub-task `index` of a computation seeded with `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  Rng mix(seed ^ (0xD1B54A32D192ED03ULL * (index + 1)));
  mix.next();
  return mix.next();
}

inline Point perp(const Point &v) { return {-v.y(), v.x()}; }

inline double cross(const Point &a, const Point &b) {
  return a.x() * b.y() - a.y() * b.x();
}

} // namespace linkage

#endif // LINKAGE_CORE_HPP

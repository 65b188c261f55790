#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace plqstab {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Generator for sample `index` of a run seeded with `seed`.
///
/// Streams depend only on (seed, index), so samples can be drawn in any order
/// and still reproduce bit for bit. Distributions are implemented here rather
/// than taken from <random>, whose algorithms vary between standard libraries.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t index) : engine_(splitmix64(seed ^ splitmix64(index + 1))) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  bool coin() { return (engine_() >> 63) != 0; }

  Eigen::VectorXd unit_vector(int dim) {
    Eigen::VectorXd d(dim);
    do {
      for (int i = 0; i < dim; ++i) d(i) = normal();
    } while (d.norm() == 0.0);
    return d / d.norm();
  }

  /// Uniform point of the closed Euclidean ball.
  Eigen::VectorXd in_ball(const Eigen::VectorXd& center, double radius) {
    const int dim = static_cast<int>(center.size());
    if (dim == 0) return center;
    const double r = radius * std::pow(uniform(), 1.0 / dim);
    return center + r * unit_vector(dim);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace plqstab

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "primalign/geometry.hpp"

namespace primalign {

// Seeded generator with self-contained distributions, so that identical seeds
// give identical streams on every build of the library. Normal deviates use
// Box-Muller on 53-bit uniforms; nothing here depends on the standard
// library's distribution implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  Vec3 normal_vec3() { return Vec3(normal(), normal(), normal()); }

  Vec3 unit_vector() {
    for (;;) {
      const Vec3 v = normal_vec3();
      const double n = v.norm();
      if (n > 1e-12) return v / n;
    }
  }

  // Uniform over the solid ball of the given radius.
  Vec3 ball(double radius) { return unit_vector() * (radius * std::cbrt(uniform())); }

  // Uniform over the rotation group: normalized Gaussian quaternion.
  Quat unit_quaternion() {
    Quat q;
    q.x() = normal();
    q.y() = normal();
    q.z() = normal();
    q.w() = normal();
    q.normalize();
    return q;
  }

  Mat3 rotation() { return unit_quaternion().toRotationMatrix(); }

  // Uniform over the probability simplex (normalized exponentials).
  std::vector<double> simplex(int k) {
    std::vector<double> w(k);
    double sum = 0.0;
    for (double& wi : w) {
      wi = -std::log(1.0 - uniform());
      sum += wi;
    }
    for (double& wi : w) wi /= sum;
    return w;
  }

  uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// Stable per-trial seed derivation (splitmix64 of master + index).
inline uint64_t derive_seed(uint64_t master, uint64_t index) {
  uint64_t z = master + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace primalign

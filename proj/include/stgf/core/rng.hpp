#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "stgf/core/types.hpp"

namespace stgf {

/// Deterministic random stream used by the simulator, training init and the
/// property tests. The engine is std::mt19937_64 (fully specified by the
/// standard), uniforms take the top 53 bits, and Gaussian draws use the
/// Box-Muller transform (two uniforms per draw, no rejection), so streams are
/// bit-identical across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(uniform() * static_cast<double>(hi - lo + 1));
  }

  /// Standard normal via Box-Muller; consumes exactly two uniforms.
  double gauss() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  Vec3 gauss_vec3(double sigma) {
    return Vec3(sigma * gauss(), sigma * gauss(), sigma * gauss());
  }

 private:
  std::mt19937_64 gen_;
};

/// splitmix64 finalizer; used to derive independent substreams.
inline std::uint64_t mix_u64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Fixed derivation rule for per-instance (and per-retry) streams.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t retry = 0) {
  return mix_u64(mix_u64(seed ^ mix_u64(stream)) + retry);
}

}  // namespace stgf

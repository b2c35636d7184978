#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace rearr {

// splitmix64 finalizer; good avalanche, used only for seed derivation.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Deterministic per-task seed from a master seed and two indices.
/// Chained mixing keeps streams for distinct (a, b) decorrelated, so
/// replications can run in any order or in parallel and still reproduce.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b) {
  std::uint64_t s = mix64(master ^ 0xD1B54A32D192ED03ull);
  s = mix64(s ^ (a * 0x9E3779B97F4A7C15ull + 1));
  s = mix64(s ^ (b * 0xBF58476D1CE4E5B9ull + 2));
  return s;
}

/// mt19937_64 engine with hand-rolled uniform and normal transforms.
/// std::uniform_real_distribution / std::normal_distribution are
/// implementation-defined, which would break bit-identical replays
/// across toolchains; these transforms are pinned.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t raw() { return eng_(); }

  // Uniform on (0,1), 53-bit mantissa, never exactly 0 or 1.
  double uniform01() {
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Marsaglia polar; caches the spare deviate.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace rearr

#pragma once

#include <cstdint>
#include <random>

namespace scpd {

/// splitmix64 finalizer. Used to whiten seeds and to derive independent
/// per-stream seeds from a master seed.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Seed for an independent stream (e.g. one per snapshot timestep).
/// Streams are random-access: deriving stream t does not depend on any
/// other stream having been drawn, so snapshots can be processed in any
/// order or concurrently with identical results.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::int64_t stream) {
  return mix64(master ^ mix64(static_cast<std::uint64_t>(stream)));
}

/// mt19937_64 with portable output conversions. The engine's bit stream is
/// pinned by the C++ standard; we avoid std::*_distribution because their
/// outputs differ across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random mantissa bits.
  double next_double() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be positive.
  std::int64_t next_index(std::int64_t n) {
    auto i = static_cast<std::int64_t>(next_double() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

  bool bernoulli(double p) { return next_double() < p; }

  /// +1 or -1 with equal probability (top bit of one draw).
  double rademacher() { return (engine_() >> 63) ? 1.0 : -1.0; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace scpd

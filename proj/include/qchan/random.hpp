#pragma once

#include <cstdint>
#include <random>

namespace qchan {

/// Reproducible stream: std::mt19937_64 (sequence fixed by the standard),
/// with uniforms built from the top 53 bits. No std distributions are used,
/// so output is identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for point `index` of a run seeded with `seed`.
  static Rng stream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next() { return engine_(); }
  /// [0, 1)
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller (one draw per call, two uniforms).
  double normal();
  /// Inversion for mean < 30, normal approximation with continuity
  /// correction above. Mean 0 always yields 0.
  std::uint64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace qchan

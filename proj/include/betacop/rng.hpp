#pragma once

#include <cstdint>
#include <random>

namespace betacop {

// splitmix64 finalizer; used for seed derivation only.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Substream scheme: a substream is addressed by (master_seed, tag, a, b),
// hashed through three splitmix64 rounds. Tags partition usage (samples,
// evaluation points, tie-breaking, ...); (a, b) are typically (n, replicate).
// Distinct addresses never share a stream.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t h = mix64(master ^ (0x9E3779B97F4A7C15ull * (tag + 1)));
  h = mix64(h ^ (0xBF58476D1CE4E5B9ull * (a + 1)));
  h = mix64(h ^ (0x94D049BB133111EBull * (b + 1)));
  return h;
}

/// Deterministic uniform stream on top of mt19937_64. Doubles are produced
/// from raw bits directly so sequences are identical across platforms.
class RngStream {
public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1), 53-bit resolution.
  double u01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1); never returns an endpoint.
  double open01() {
    return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
  }

  /// Uniform integer in {0, ..., n-1} by rejection (unbiased).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t bound = n * ((~std::uint64_t{0}) / n);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= bound);
    return x % n;
  }

private:
  std::mt19937_64 engine_;
};

enum : std::uint64_t {
  kTagSampleA = 1,
  kTagSampleB = 2,
  kTagEvalPoint = 3,
  kTagTiesA = 4,
  kTagTiesB = 5,
  kTagLimseSample = 6,
  kTagLimseTies = 7,
  kTagLimsePoint = 8,
};

}  // namespace betacop

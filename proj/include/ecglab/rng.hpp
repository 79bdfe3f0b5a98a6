#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ecglab {

inline constexpr std::uint64_t kDefaultSeed = 20190514;

/// SplitMix64 finalizer; maps (master seed, stream index) to a well-mixed seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Thin wrapper over mt19937_64 with portable variate generation. The
/// standard distributions are implementation-defined, so every variate used
/// by the library is derived from raw 64-bit draws here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t master, std::uint64_t stream) : engine_(derive_seed(master, stream)) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n);
  double exponential() { return -std::log(uniform()); }
  /// +1 or -1 with equal probability.
  int sign() { return (engine_() >> 63) ? 1 : -1; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ecglab

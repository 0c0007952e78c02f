#pragma once

#include <cstdint>
#include <random>

namespace kerrq {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Seedable generator with a fixed, platform-independent normal transform
/// (the standard library's distributions are not portable bit for bit).
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  /// Standard normal via Box-Muller; pairs are consumed in order.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Samples are drawn in fixed-size chunks, each from its own stream, so the
/// output does not depend on how chunks are scheduled across threads.
inline constexpr int kSampleChunk = 4096;

}  // namespace kerrq

#pragma once

#include <array>
#include <cstdint>

namespace mollify {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3").  Pure function of (counter, key).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Independent random streams.  Each sampling routine owns one tag so that,
/// for example, the coefficient law never shares draws with the Brownian
/// driver of the same path.
enum class StreamTag : std::uint32_t {
  Coefficient = 1,
  Brownian = 2,
  Bridge = 3,
};

/// Counter-based stream identified by (seed, tag, index).  Streams with
/// different identities are statistically independent and the draw sequence
/// of one stream does not depend on how many draws other streams consumed,
/// which makes per-path parallelism output-invariant.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, StreamTag tag, std::uint64_t index);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  /// Standard normal via Box-Muller; pairs are cached.
  double normal();
  /// Exponential with the given rate (> 0).
  double exponential(double rate);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mollify

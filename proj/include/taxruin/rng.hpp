#pragma once

#include <array>
#include <cstdint>

namespace taxruin {

/// Philox4x32-10 block function (Salmon et al., Random123).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Counter-based random stream keyed by (seed, stream id).
///
/// Streams with different (seed, id) pairs are disjoint; a stream's n-th draw
/// depends only on (seed, id, n), so replicas can be evaluated on any worker
/// in any order.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();
  /// Uniform on (0, 1], 53-bit resolution.
  double uniform();
  /// Standard exponential.
  double exponential();
  /// Standard normal (Box-Muller, pairs are consumed in order).
  double normal();

  std::uint64_t blocks_used() const { return block_; }

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int next_word_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace taxruin

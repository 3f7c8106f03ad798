#pragma once

#include <cstdint>
#include <span>

namespace opqkd {

/// Counter-based random stream keyed by (seed, stream id).
///
/// Each draw is a SplitMix64 finalizer applied to a key derived from the
/// pair plus a running counter, so the sequence depends only on the key and
/// is identical on every platform and under any thread schedule. Standard
/// library distributions are avoided for the same reason.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] std::uint64_t stream_id() const { return stream_; }

  std::uint64_t next_u64();
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, bound); bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound);
  /// Index drawn with the given (nonnegative, not necessarily normalized)
  /// weights. Never returns an index whose weight is zero.
  std::size_t sample(std::span<const double> weights);

  /// Independent stream for a named purpose within the same (seed, stream).
  [[nodiscard]] RngStream fork(std::uint64_t tag) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace opqkd

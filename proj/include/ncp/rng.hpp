#pragma once

// Counter-based random streams.
//
// A stream is keyed by (seed, stream_id); draw k is mix(key + (k+1)·γ) with
// the SplitMix64 finalizer and Weyl increment γ. Any draw can therefore be
// reproduced from the key and its position alone, and independent tasks
// (advice rows, experiment trials) each take their own stream_id instead of
// sharing a generator.

#include <cstdint>
#include <string_view>

namespace ncp {

class RngStream {
 public:
  static constexpr std::string_view kGenerator = "splitmix64-ctr-v1";

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t position() const { return counter_; }

  std::uint64_t next_u64();
  /// Uniform k-bit value, 0 <= k <= 64.
  std::uint64_t next_bits(unsigned k);
  /// Uniform in [0, bound) by rejection from the enclosing power-of-two range.
  std::uint64_t next_index(std::uint64_t bound);
  /// Uniform double in [0, 1) with 53 random bits.
  double next_unit();
  bool next_bernoulli(double p);

  /// Independent child stream; a pure function of (seed, stream_id, child_id).
  RngStream substream(std::uint64_t child_id) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

inline RngStream rng_stream(std::uint64_t seed, std::uint64_t stream_id) { return {seed, stream_id}; }

std::uint64_t mix64(std::uint64_t z);

/// Seed for the `index`-th derived task of `seed` (trials, code groups, ...).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t index);

}  // namespace ncp

#include "ncp/rng.hpp"

#include <bit>
#include <stdexcept>

namespace ncp {

namespace {
constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kStreamSalt = 0xd1b54a32d192ed03ULL;
}  // namespace

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
  return mix64(mix64(seed ^ (tag * kStreamSalt)) + (index + 1) * kGamma);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), key_(mix64(mix64(seed) ^ mix64(stream_id * kStreamSalt + kGamma))) {}

std::uint64_t RngStream::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGamma);
}

std::uint64_t RngStream::next_bits(unsigned k) {
  if (k > 64) throw std::invalid_argument("next_bits: k above 64");
  if (k == 0) return 0;
  return next_u64() >> (64 - k);
}

std::uint64_t RngStream::next_index(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("next_index: bound must be >= 1");
  if (bound == 1) return 0;
  const std::uint64_t mask =
      bound > (std::uint64_t{1} << 63) ? ~std::uint64_t{0} : std::bit_ceil(bound) - 1;
  for (;;) {
    const std::uint64_t x = next_u64() & mask;
    if (x < bound) return x;
  }
}

double RngStream::next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

bool RngStream::next_bernoulli(double p) { return next_unit() < p; }

RngStream RngStream::substream(std::uint64_t child_id) const { return {key_, child_id}; }

}  // namespace ncp

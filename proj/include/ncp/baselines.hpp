#pragma once

// Reference decoders: exhaustive nearest codeword and Prange information-set decoding.

#include <cstddef>
#include <cstdint>
#include <optional>

#include "ncp/codes.hpp"
#include "ncp/exec.hpp"
#include "ncp/f2.hpp"
#include "ncp/rng.hpp"

namespace ncp {

struct OracleResult {
  BitVec x_star;  // lexicographically smallest minimiser
  std::size_t distance = 0;
  bool unique = false;
};

/// Exact minimum over all 2^n codewords; throws CapExceeded for n > cap.
OracleResult exhaustive_nearest(const LinearCode& code, BitRef w, std::size_t cap = kEnumerationCap,
                                Exec exec = Exec::Parallel);

struct PrangeResult {
  std::optional<BitVec> message;  // nullopt: NotFound within max_iters
  std::uint64_t iterations = 0;
  std::uint64_t singular = 0;
};

/// Attempt k picks n distinct uniform coordinates from rng.substream(k);
/// a singular restriction counts as a spent attempt.
PrangeResult prange_decode(const LinearCode& code, BitRef w, std::size_t target_distance, const RngStream& rng,
                           std::uint64_t max_iters, Exec exec = Exec::Parallel);

/// 1 / Pr[n uniform distinct coordinates avoid all `errors` error positions].
double prange_expected_iterations(std::size_t m, std::size_t n, std::size_t errors);

}  // namespace ncp

#pragma once

// Hot loops shared by the decoder, the samplers and the experiments. Each
// kernel has a serial reference in `serial::` and an OpenMP version in
// `parallel::`; the dispatchers at the bottom pick one by policy.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ncp/exec.hpp"
#include "ncp/f2.hpp"
#include "ncp/rng.hpp"

namespace ncp {

class LinearCode;

/// Weight profile of the coset offset + C, found by enumerating all 2^n messages.
struct CosetScan {
  std::vector<std::uint64_t> histogram;  // histogram[k] = #{x : wt(Cx + offset) = k}
  std::size_t min_weight = 0;            // over all x
  std::uint64_t min_x = 0;               // lexicographically smallest minimiser
  std::uint64_t min_count = 0;
  std::size_t nz_min_weight = 0;  // over x != 0
  std::uint64_t nz_min_x = 0;
  std::size_t nz_max_weight = 0;
  std::uint64_t nz_max_x = 0;
};

/// Key under which message x (bit j = coordinate j) sorts lexicographically
/// as the string x_0 x_1 ... x_{n-1}.
std::uint64_t lex_key(std::uint64_t x, std::size_t n);

struct SamplerStats {
  std::uint64_t trials = 0;
  std::uint64_t accepted = 0;
};

/// Raw sums of a Monte Carlo gap run; exact integers so any reduction order agrees.
struct GapSums {
  std::uint64_t trials = 0;
  __int128 sum_lpn = 0;
  __int128 sumsq_lpn = 0;
  __int128 sum_uniform = 0;
  __int128 sumsq_uniform = 0;
};

struct PrangeRun {
  std::optional<std::uint64_t> message;
  std::uint64_t iterations = 0;  // attempts up to and including the hit
  std::uint64_t singular = 0;    // attempts whose restricted matrix was singular
};

/// One D_C rejection draw written into `out`; returns the trials it took, or
/// nullopt after `max_trials` rejections.
std::optional<std::uint64_t> sample_dc_row(std::span<const std::uint64_t> column_syndromes, unsigned ell,
                                           RngStream& rng, std::uint64_t max_trials,
                                           std::span<std::uint64_t> out);

class SamplerExhausted;

namespace serial {
std::int64_t signed_sum(const BitMatrix& rows, BitRef shifts, BitRef w);
std::int64_t coordinate_sums(const BitMatrix& rows, BitRef shifts, BitRef w, std::span<std::int64_t> acc);
CosetScan scan_coset(const BitMatrix& columns, BitRef offset);
SamplerStats fill_rejection_rows(std::span<const std::uint64_t> column_syndromes, unsigned ell,
                                 std::uint64_t seed, std::uint64_t max_trials, BitMatrix& rows);
GapSums gap_sums(const LinearCode& code, const BitMatrix& h, BitRef b, double eta, std::uint64_t trials,
                 const RngStream& base);
PrangeRun prange(const LinearCode& code, BitRef w, std::size_t target, const RngStream& base,
                 std::uint64_t max_iters);
}  // namespace serial

namespace parallel {
std::int64_t signed_sum(const BitMatrix& rows, BitRef shifts, BitRef w);
std::int64_t coordinate_sums(const BitMatrix& rows, BitRef shifts, BitRef w, std::span<std::int64_t> acc);
CosetScan scan_coset(const BitMatrix& columns, BitRef offset);
SamplerStats fill_rejection_rows(std::span<const std::uint64_t> column_syndromes, unsigned ell,
                                 std::uint64_t seed, std::uint64_t max_trials, BitMatrix& rows);
GapSums gap_sums(const LinearCode& code, const BitMatrix& h, BitRef b, double eta, std::uint64_t trials,
                 const RngStream& base);
PrangeRun prange(const LinearCode& code, BitRef w, std::size_t target, const RngStream& base,
                 std::uint64_t max_iters);
}  // namespace parallel

namespace kernels {

/// Σ_k (-1)^{<h_k, w> + b_k}.
inline std::int64_t signed_sum(const BitMatrix& rows, BitRef shifts, BitRef w, Exec e) {
  return e == Exec::Serial ? serial::signed_sum(rows, shifts, w) : parallel::signed_sum(rows, shifts, w);
}

/// Returns Σ_k s_k with s_k = (-1)^{<h_k, w> + b_k} and fills acc[i] = Σ_{k : h_ki = 1} s_k.
inline std::int64_t coordinate_sums(const BitMatrix& rows, BitRef shifts, BitRef w,
                                    std::span<std::int64_t> acc, Exec e) {
  return e == Exec::Serial ? serial::coordinate_sums(rows, shifts, w, acc)
                           : parallel::coordinate_sums(rows, shifts, w, acc);
}

inline CosetScan scan_coset(const BitMatrix& columns, BitRef offset, Exec e) {
  return e == Exec::Serial ? serial::scan_coset(columns, offset) : parallel::scan_coset(columns, offset);
}

/// Row i is drawn from RngStream(seed, i).
inline SamplerStats fill_rejection_rows(std::span<const std::uint64_t> syn, unsigned ell, std::uint64_t seed,
                                        std::uint64_t max_trials, BitMatrix& rows, Exec e) {
  return e == Exec::Serial ? serial::fill_rejection_rows(syn, ell, seed, max_trials, rows)
                           : parallel::fill_rejection_rows(syn, ell, seed, max_trials, rows);
}

/// Trial j draws from base.substream(j).
inline GapSums gap_sums(const LinearCode& code, const BitMatrix& h, BitRef b, double eta, std::uint64_t trials,
                        const RngStream& base, Exec e) {
  return e == Exec::Serial ? serial::gap_sums(code, h, b, eta, trials, base)
                           : parallel::gap_sums(code, h, b, eta, trials, base);
}

/// Attempt k draws its information set from base.substream(k); the lowest
/// successful attempt wins.
inline PrangeRun prange(const LinearCode& code, BitRef w, std::size_t target, const RngStream& base,
                        std::uint64_t max_iters, Exec e) {
  return e == Exec::Serial ? serial::prange(code, w, target, base, max_iters)
                           : parallel::prange(code, w, target, base, max_iters);
}

}  // namespace kernels
}  // namespace ncp

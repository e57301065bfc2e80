#pragma once

// Per-item bodies shared by the serial and OpenMP kernels. Only the loop
// decomposition and the reductions differ between the two files.

#include <bit>
#include <cstdint>
#include <limits>
#include <utility>

#include "ncp/codes.hpp"
#include "ncp/distinguisher.hpp"
#include "ncp/kernels.hpp"

namespace ncp::detail {

inline constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

inline bool better(std::size_t wa, std::uint64_t ka, std::size_t wb, std::uint64_t kb, bool larger) {
  if (wa != wb) return larger ? wa > wb : wa < wb;
  return ka < kb;
}

inline CosetScan empty_scan(std::size_t m) {
  CosetScan s;
  s.histogram.assign(m + 1, 0);
  s.min_weight = kNone;
  s.nz_min_weight = kNone;
  s.nz_max_weight = kNone;
  return s;
}

/// Scans Gray-code indices [lo, hi) of the message space.
inline CosetScan scan_range(const BitMatrix& cols, BitRef offset, std::uint64_t lo, std::uint64_t hi) {
  const std::size_t n = cols.rows();
  CosetScan s = empty_scan(cols.cols());
  std::uint64_t x = lo ^ (lo >> 1);
  BitVec v(offset);
  for (std::size_t j = 0; j < n; ++j)
    if ((x >> j) & 1U) v ^= cols.row(j);

  std::uint64_t min_key = 0, nz_min_key = 0, nz_max_key = 0;
  for (std::uint64_t g = lo; g < hi; ++g) {
    if (g > lo) {
      const auto bit = static_cast<std::size_t>(std::countr_zero(g));
      v ^= cols.row(bit);
      x ^= std::uint64_t{1} << bit;
    }
    const std::size_t wt = weight(v);
    const std::uint64_t key = lex_key(x, n);
    ++s.histogram[wt];
    if (s.min_weight == kNone || better(wt, key, s.min_weight, min_key, false)) {
      s.min_count = (wt == s.min_weight) ? s.min_count + 1 : 1;
      s.min_weight = wt;
      s.min_x = x;
      min_key = key;
    } else if (wt == s.min_weight) {
      ++s.min_count;
    }
    if (x == 0) continue;
    if (s.nz_min_weight == kNone || better(wt, key, s.nz_min_weight, nz_min_key, false)) {
      s.nz_min_weight = wt;
      s.nz_min_x = x;
      nz_min_key = key;
    }
    if (s.nz_max_weight == kNone || better(wt, key, s.nz_max_weight, nz_max_key, true)) {
      s.nz_max_weight = wt;
      s.nz_max_x = x;
      nz_max_key = key;
    }
  }
  return s;
}

inline void merge_scan(CosetScan& into, const CosetScan& part, std::size_t n) {
  for (std::size_t k = 0; k < into.histogram.size(); ++k) into.histogram[k] += part.histogram[k];
  if (part.min_weight != kNone) {
    if (into.min_weight == kNone || part.min_weight < into.min_weight) {
      into.min_weight = part.min_weight;
      into.min_x = part.min_x;
      into.min_count = part.min_count;
    } else if (part.min_weight == into.min_weight) {
      into.min_count += part.min_count;
      if (lex_key(part.min_x, n) < lex_key(into.min_x, n)) into.min_x = part.min_x;
    }
  }
  if (part.nz_min_weight != kNone &&
      (into.nz_min_weight == kNone ||
       better(part.nz_min_weight, lex_key(part.nz_min_x, n), into.nz_min_weight, lex_key(into.nz_min_x, n), false))) {
    into.nz_min_weight = part.nz_min_weight;
    into.nz_min_x = part.nz_min_x;
  }
  if (part.nz_max_weight != kNone &&
      (into.nz_max_weight == kNone ||
       better(part.nz_max_weight, lex_key(part.nz_max_x, n), into.nz_max_weight, lex_key(into.nz_max_x, n), true))) {
    into.nz_max_weight = part.nz_max_weight;
    into.nz_max_x = part.nz_max_x;
  }
}

inline int sign_of(std::span<const std::uint64_t> row, BitRef shifts, std::size_t k, BitRef w) {
  return (dot_words(row, w.words()) ^ shifts[k]) ? -1 : 1;
}

inline void add_to_support(std::span<const std::uint64_t> row, std::int64_t s, std::int64_t* acc) {
  for (std::size_t k = 0; k < row.size(); ++k) {
    std::uint64_t x = row[k];
    while (x) {
      acc[k * kWordBits + static_cast<std::size_t>(std::countr_zero(x))] += s;
      x &= x - 1;
    }
  }
}

inline std::pair<std::int64_t, std::int64_t> gap_trial(const LinearCode& code, const BitMatrix& h, BitRef b,
                                                       double eta, RngStream rng) {
  const BitVec w = lpn_sample(code, eta, rng).w;
  BitVec r(code.m());
  for (auto& word : r.words()) word = rng.next_u64();
  r.words().back() &= tail_mask(code.m());
  std::int64_t aw = 0, ar = 0;
  for (std::size_t k = 0; k < h.rows(); ++k) {
    aw += sign_of(h.row_words(k), b, k, w);
    ar += sign_of(h.row_words(k), b, k, r);
  }
  return {aw, ar};
}

enum class AttemptStatus { Singular, Miss, Hit };

struct Attempt {
  AttemptStatus status = AttemptStatus::Singular;
  std::uint64_t x = 0;
};

inline Attempt prange_attempt(const LinearCode& code, BitRef w, std::size_t target, RngStream rng) {
  const std::size_t n = code.n();
  const auto syn = code.column_syndromes();
  std::uint64_t rows[kMaxMessageBits];
  bool rhs[kMaxMessageBits];
  std::size_t chosen[kMaxMessageBits];
  std::size_t count = 0;
  while (count < n) {
    const auto c = static_cast<std::size_t>(rng.next_index(code.m()));
    bool dup = false;
    for (std::size_t j = 0; j < count && !dup; ++j) dup = chosen[j] == c;
    if (!dup) chosen[count++] = c;
  }
  for (std::size_t j = 0; j < n; ++j) {
    rows[j] = syn[chosen[j]];
    rhs[j] = w[chosen[j]];
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && !((rows[p] >> c) & 1U)) ++p;
    if (p == n) return {};
    std::swap(rows[p], rows[c]);
    std::swap(rhs[p], rhs[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r != c && ((rows[r] >> c) & 1U)) {
        rows[r] ^= rows[c];
        rhs[r] ^= rhs[c];
      }
    }
  }
  Attempt a;
  for (std::size_t c = 0; c < n; ++c)
    if (rhs[c]) a.x |= std::uint64_t{1} << c;
  const BitVec v = code.encode_bits(a.x);
  std::size_t dist = 0;
  for (std::size_t k = 0; k < v.words().size(); ++k)
    dist += static_cast<std::size_t>(std::popcount(v.words()[k] ^ w.words()[k]));
  a.status = dist <= target ? AttemptStatus::Hit : AttemptStatus::Miss;
  return a;
}

}  // namespace ncp::detail

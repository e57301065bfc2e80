#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ncp/codes.hpp"
#include "ncp/f2.hpp"

namespace ncp::testing {

inline LinearCode code_of(const std::vector<std::string>& columns) {
  std::vector<BitVec> cols;
  for (const auto& c : columns) cols.push_back(BitVec::parse(c));
  return LinearCode::from_columns(cols);
}

/// Every length-m word, in counting order.
inline std::vector<BitVec> all_words(std::size_t m) {
  std::vector<BitVec> out;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << m); ++x) out.push_back(BitVec::from_uint(m, x));
  return out;
}

/// Every codeword C·x, listed by message x.
inline std::vector<BitVec> codewords(const LinearCode& c) {
  std::vector<BitVec> out;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << c.n()); ++x) out.push_back(c.encode_bits(x));
  return out;
}

/// Dual code by brute force: all h with <h, v> = 0 for every generator column.
inline std::vector<BitVec> dual_words(const LinearCode& c) {
  std::vector<BitVec> out;
  for (const BitVec& h : all_words(c.m())) {
    bool ok = true;
    for (std::size_t j = 0; j < c.n() && ok; ++j) ok = !dot(h, c.columns().row(j));
    if (ok) out.push_back(h);
  }
  return out;
}

/// Random code whose nonzero codewords all have weight exactly m/2.
inline LinearCode perfectly_balanced_code(std::size_t m, std::size_t n, RngStream& rng) {
  for (;;) {
    LinearCode c = random_code(m, n, rng);
    if (audit_balance(c, kEnumerationCap, Exec::Serial).beta_star == 0.0) return c;
  }
}

/// Every length-m word of weight at most k.
inline std::vector<BitVec> words_up_to(std::size_t m, std::size_t k) {
  std::vector<BitVec> out;
  for (const BitVec& v : all_words(m))
    if (weight(v) <= k) out.push_back(v);
  return out;
}

/// |observed - expected| in units of the binomial standard error.
inline double binomial_z(double hits, double trials, double p) {
  const double sd = std::sqrt(trials * p * (1.0 - p));
  return sd == 0.0 ? (hits == trials * p ? 0.0 : INFINITY) : std::abs(hits - trials * p) / sd;
}

}  // namespace ncp::testing

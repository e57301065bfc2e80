#include <vector>

#include "kernel_parts.hpp"
#include "ncp/dist.hpp"

namespace ncp {

std::uint64_t lex_key(std::uint64_t x, std::size_t n) {
  std::uint64_t r = 0;
  for (std::size_t j = 0; j < n; ++j)
    if ((x >> j) & 1U) r |= std::uint64_t{1} << (n - 1 - j);
  return r;
}

std::optional<std::uint64_t> sample_dc_row(std::span<const std::uint64_t> syn, unsigned ell, RngStream& rng,
                                           std::uint64_t max_trials, std::span<std::uint64_t> out) {
  const std::uint64_t m = syn.size();
  std::vector<std::size_t> idx(ell);
  for (std::uint64_t t = 1; t <= max_trials; ++t) {
    std::uint64_t s = 0;
    for (unsigned j = 0; j < ell; ++j) {
      idx[j] = static_cast<std::size_t>(rng.next_index(m));
      s ^= syn[idx[j]];
    }
    if (s == 0) {
      for (auto& word : out) word = 0;
      for (auto i : idx) out[i / kWordBits] ^= std::uint64_t{1} << (i % kWordBits);
      return t;
    }
  }
  return std::nullopt;
}

namespace serial {

std::int64_t signed_sum(const BitMatrix& rows, BitRef shifts, BitRef w) {
  std::int64_t s = 0;
  for (std::size_t k = 0; k < rows.rows(); ++k) s += detail::sign_of(rows.row_words(k), shifts, k, w);
  return s;
}

std::int64_t coordinate_sums(const BitMatrix& rows, BitRef shifts, BitRef w, std::span<std::int64_t> acc) {
  std::fill(acc.begin(), acc.end(), 0);
  std::int64_t total = 0;
  for (std::size_t k = 0; k < rows.rows(); ++k) {
    const int s = detail::sign_of(rows.row_words(k), shifts, k, w);
    total += s;
    detail::add_to_support(rows.row_words(k), s, acc.data());
  }
  return total;
}

CosetScan scan_coset(const BitMatrix& columns, BitRef offset) {
  return detail::scan_range(columns, offset, 0, std::uint64_t{1} << columns.rows());
}

SamplerStats fill_rejection_rows(std::span<const std::uint64_t> syn, unsigned ell, std::uint64_t seed,
                                 std::uint64_t max_trials, BitMatrix& rows) {
  SamplerStats st;
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    RngStream rng(seed, i);
    const auto used = sample_dc_row(syn, ell, rng, max_trials, rows.row_words(i));
    if (!used) throw SamplerExhausted(st.trials + max_trials, st.accepted, i);
    st.trials += *used;
    ++st.accepted;
  }
  return st;
}

GapSums gap_sums(const LinearCode& code, const BitMatrix& h, BitRef b, double eta, std::uint64_t trials,
                 const RngStream& base) {
  GapSums g;
  g.trials = trials;
  for (std::uint64_t j = 0; j < trials; ++j) {
    const auto [aw, ar] = detail::gap_trial(code, h, b, eta, base.substream(j));
    g.sum_lpn += aw;
    g.sumsq_lpn += static_cast<__int128>(aw) * aw;
    g.sum_uniform += ar;
    g.sumsq_uniform += static_cast<__int128>(ar) * ar;
  }
  return g;
}

PrangeRun prange(const LinearCode& code, BitRef w, std::size_t target, const RngStream& base,
                 std::uint64_t max_iters) {
  PrangeRun run;
  for (std::uint64_t k = 0; k < max_iters; ++k) {
    const auto a = detail::prange_attempt(code, w, target, base.substream(k));
    run.iterations = k + 1;
    if (a.status == detail::AttemptStatus::Singular) ++run.singular;
    if (a.status == detail::AttemptStatus::Hit) {
      run.message = a.x;
      return run;
    }
  }
  return run;
}

}  // namespace serial
}  // namespace ncp

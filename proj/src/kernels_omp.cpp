#include <omp.h>

#include <algorithm>
#include <limits>
#include <vector>

#include "kernel_parts.hpp"
#include "ncp/dist.hpp"

namespace ncp {

void set_thread_count(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

int thread_count() { return omp_get_max_threads(); }

namespace parallel {

std::int64_t signed_sum(const BitMatrix& rows, BitRef shifts, BitRef w) {
  const auto n = static_cast<std::int64_t>(rows.rows());
  std::int64_t s = 0;
#pragma omp parallel for schedule(static) reduction(+ : s)
  for (std::int64_t k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    s += detail::sign_of(rows.row_words(i), shifts, i, w);
  }
  return s;
}

std::int64_t coordinate_sums(const BitMatrix& rows, BitRef shifts, BitRef w, std::span<std::int64_t> acc) {
  std::fill(acc.begin(), acc.end(), 0);
  const auto n = static_cast<std::int64_t>(rows.rows());
  std::int64_t total = 0;
#pragma omp parallel reduction(+ : total)
  {
    std::vector<std::int64_t> local(acc.size(), 0);
#pragma omp for schedule(static)
    for (std::int64_t k = 0; k < n; ++k) {
      const auto i = static_cast<std::size_t>(k);
      const int s = detail::sign_of(rows.row_words(i), shifts, i, w);
      total += s;
      detail::add_to_support(rows.row_words(i), s, local.data());
    }
#pragma omp critical(ncp_coordinate_sums)
    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += local[j];
  }
  return total;
}

CosetScan scan_coset(const BitMatrix& columns, BitRef offset) {
  const std::size_t n = columns.rows();
  const std::uint64_t total = std::uint64_t{1} << n;
  const std::uint64_t chunks = std::min<std::uint64_t>(total, 1024);
  const std::uint64_t len = total / chunks;
  std::vector<CosetScan> parts(chunks);
  const auto count = static_cast<std::int64_t>(chunks);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t c = 0; c < count; ++c) {
    const auto lo = static_cast<std::uint64_t>(c) * len;
    parts[static_cast<std::size_t>(c)] = detail::scan_range(columns, offset, lo, lo + len);
  }
  CosetScan out = detail::empty_scan(columns.cols());
  for (const auto& p : parts) detail::merge_scan(out, p, n);
  return out;
}

SamplerStats fill_rejection_rows(std::span<const std::uint64_t> syn, unsigned ell, std::uint64_t seed,
                                 std::uint64_t max_trials, BitMatrix& rows) {
  const auto n = static_cast<std::int64_t>(rows.rows());
  std::uint64_t trials = 0;
  std::uint64_t accepted = 0;
  std::int64_t failed = std::numeric_limits<std::int64_t>::max();
#pragma omp parallel for schedule(dynamic, 256) reduction(+ : trials, accepted)
  for (std::int64_t i = 0; i < n; ++i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    const auto used = sample_dc_row(syn, ell, rng, max_trials, rows.row_words(static_cast<std::size_t>(i)));
    if (used) {
      trials += *used;
      ++accepted;
    } else {
      trials += max_trials;
#pragma omp critical(ncp_fill_failed)
      failed = std::min(failed, i);
    }
  }
  if (failed != std::numeric_limits<std::int64_t>::max())
    throw SamplerExhausted(trials, accepted, static_cast<std::uint64_t>(failed));
  return {trials, accepted};
}

GapSums gap_sums(const LinearCode& code, const BitMatrix& h, BitRef b, double eta, std::uint64_t trials,
                 const RngStream& base) {
  GapSums g;
  g.trials = trials;
  const auto n = static_cast<std::int64_t>(trials);
#pragma omp parallel
  {
    GapSums local;
#pragma omp for schedule(static)
    for (std::int64_t j = 0; j < n; ++j) {
      const auto [aw, ar] = detail::gap_trial(code, h, b, eta, base.substream(static_cast<std::uint64_t>(j)));
      local.sum_lpn += aw;
      local.sumsq_lpn += static_cast<__int128>(aw) * aw;
      local.sum_uniform += ar;
      local.sumsq_uniform += static_cast<__int128>(ar) * ar;
    }
#pragma omp critical(ncp_gap_sums)
    {
      g.sum_lpn += local.sum_lpn;
      g.sumsq_lpn += local.sumsq_lpn;
      g.sum_uniform += local.sum_uniform;
      g.sumsq_uniform += local.sumsq_uniform;
    }
  }
  return g;
}

PrangeRun prange(const LinearCode& code, BitRef w, std::size_t target, const RngStream& base,
                 std::uint64_t max_iters) {
  constexpr std::uint64_t kBatch = 256;
  PrangeRun run;
  std::vector<detail::Attempt> batch(kBatch);
  for (std::uint64_t first = 0; first < max_iters; first += kBatch) {
    const std::uint64_t len = std::min(kBatch, max_iters - first);
    const auto count = static_cast<std::int64_t>(len);
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < count; ++k) {
      const auto idx = static_cast<std::uint64_t>(k);
      batch[idx] = detail::prange_attempt(code, w, target, base.substream(first + idx));
    }
    for (std::uint64_t k = 0; k < len; ++k) {
      run.iterations = first + k + 1;
      if (batch[k].status == detail::AttemptStatus::Singular) ++run.singular;
      if (batch[k].status == detail::AttemptStatus::Hit) {
        run.message = batch[k].x;
        return run;
      }
    }
  }
  return run;
}

}  // namespace parallel
}  // namespace ncp

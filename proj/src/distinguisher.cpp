#include "ncp/distinguisher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ncp {

void validate(const ThresholdDistinguisher& d) {
  if (d.b.size() != d.H.rows()) throw LengthMismatch(d.b.size(), d.H.rows());
}

void validate(const IntervalDistinguisher& d) {
  if (d.b.size() != d.H.rows()) throw LengthMismatch(d.b.size(), d.H.rows());
  if (d.accept.size() < 2) throw std::invalid_argument("interval distinguisher needs k >= 2 intervals");
  if (d.breakpoints.size() + 1 != d.accept.size())
    throw std::invalid_argument("interval distinguisher needs k - 1 breakpoints for k intervals");
  for (std::size_t i = 1; i < d.breakpoints.size(); ++i)
    if (d.breakpoints[i - 1] >= d.breakpoints[i]) throw std::invalid_argument("breakpoints must strictly increase");
}

std::int64_t eval_statistic(const BitMatrix& H, BitRef b, BitRef w, Exec exec) {
  if (b.size() != H.rows()) throw LengthMismatch(b.size(), H.rows());
  if (w.size() != H.cols()) throw LengthMismatch(w.size(), H.cols());
  return kernels::signed_sum(H, b, w, exec);
}

std::int64_t eval_statistic(const ThresholdDistinguisher& d, BitRef w, Exec exec) {
  return eval_statistic(d.H, d.b, w, exec);
}

std::int64_t eval_statistic(const IntervalDistinguisher& d, BitRef w, Exec exec) {
  return eval_statistic(d.H, d.b, w, exec);
}

bool accepts(const ThresholdDistinguisher& d, BitRef w, Exec exec) {
  const std::int64_t a = eval_statistic(d, w, exec);
  return d.direction == Direction::AcceptAbove ? a >= d.T : a <= d.T;
}

bool accepts(const IntervalDistinguisher& d, BitRef w, Exec exec) {
  validate(d);
  const std::int64_t a = eval_statistic(d, w, exec);
  const auto it = std::lower_bound(d.breakpoints.begin(), d.breakpoints.end(), a);
  const auto j = static_cast<std::size_t>(it - d.breakpoints.begin());
  if (it != d.breakpoints.end() && *it == a) return d.accept[j] || d.accept[j + 1];
  return d.accept[j];
}

ThresholdDistinguisher subtract_constant(const ThresholdDistinguisher& d, std::int64_t a) {
  validate(d);
  const std::uint64_t pad = a < 0 ? 0 - static_cast<std::uint64_t>(a) : static_cast<std::uint64_t>(a);
  if (pad > kDistinguisherBudget || d.size() + pad > kDistinguisherBudget)
    throw BudgetExceeded("subtract_constant: " + std::to_string(d.size()) + " + " + std::to_string(pad) +
                         " rows exceeds the 2^24 budget");
  ThresholdDistinguisher out;
  out.H = BitMatrix(d.size() + pad, d.length());
  out.b = BitVec(d.size() + pad);
  for (std::size_t i = 0; i < d.size(); ++i) {
    out.H.set_row(i, d.H.row(i));
    if (d.b[i]) out.b.set(i);
  }
  if (a > 0)
    for (std::size_t i = d.size(); i < out.b.size(); ++i) out.b.set(i);
  out.T = d.T;
  out.direction = d.direction;
  return out;
}

ThresholdDistinguisher multiply(const ThresholdDistinguisher& d1, const ThresholdDistinguisher& d2) {
  validate(d1);
  validate(d2);
  if (d1.length() != d2.length()) throw LengthMismatch(d1.length(), d2.length());
  const std::size_t n1 = d1.size(), n2 = d2.size();
  if (n2 != 0 && n1 > kDistinguisherBudget / n2)
    throw BudgetExceeded("multiply: " + std::to_string(n1) + " x " + std::to_string(n2) +
                         " rows exceeds the 2^24 budget");
  ThresholdDistinguisher out;
  out.H = BitMatrix(n1 * n2, d1.length());
  out.b = BitVec(n1 * n2);
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      const std::size_t k = i * n2 + j;
      auto dst = out.H.row_words(k);
      auto r1 = d1.H.row_words(i);
      auto r2 = d2.H.row_words(j);
      for (std::size_t q = 0; q < dst.size(); ++q) dst[q] = r1[q] ^ r2[q];
      if (d1.b[i] != d2.b[j]) out.b.set(k);
    }
  }
  out.T = d1.T;
  out.direction = d1.direction;
  return out;
}

std::size_t compiled_size_bound(std::size_t N, std::size_t k) {
  std::size_t out = 1;
  for (std::size_t i = 1; i < k; ++i) {
    if (N != 0 && out > std::numeric_limits<std::size_t>::max() / (2 * N))
      return std::numeric_limits<std::size_t>::max();
    out *= 2 * N;
  }
  return out;
}

ThresholdDistinguisher compile_interval(const IntervalDistinguisher& d) {
  validate(d);
  for (std::size_t j = 1; j < d.accept.size(); ++j)
    if (d.accept[j] == d.accept[j - 1])
      throw NotThresholdExpressible("accept pattern must alternate between neighbouring intervals (intervals " +
                                    std::to_string(j - 1) + " and " + std::to_string(j) + " agree)");
  for (std::int64_t a : d.breakpoints)
    if (a < -static_cast<std::int64_t>(d.size()) || a > static_cast<std::int64_t>(d.size()))
      throw std::invalid_argument("breakpoint " + std::to_string(a) + " outside [-N, N]");

  const ThresholdDistinguisher base{d.H, d.b, 0, Direction::AcceptAbove};
  ThresholdDistinguisher acc = subtract_constant(base, d.breakpoints.front());
  for (std::size_t i = 1; i < d.breakpoints.size(); ++i) acc = multiply(acc, subtract_constant(base, d.breakpoints[i]));
  acc.T = 0;
  acc.direction = d.accept.back() ? Direction::AcceptAbove : Direction::AcceptBelow;
  return acc;
}

LpnSample lpn_sample(const LinearCode& code, double eta, RngStream& rng) {
  if (!(eta >= 0.0 && eta <= 2.0)) throw std::invalid_argument("lpn_sample: eta must lie in [0, 2]");
  LpnSample s;
  s.x = BitVec::from_uint(code.n(), rng.next_bits(static_cast<unsigned>(code.n())));
  s.e = BitVec(code.m());
  const double p = eta / 2.0;
  for (std::size_t i = 0; i < code.m(); ++i)
    if (p >= 1.0 || rng.next_bernoulli(p)) s.e.set(i);
  s.w = code.encode(s.x);
  s.w ^= s.e;
  return s;
}

double predicted_mean_lpn(const LinearCode& code, const ThresholdDistinguisher& d, double eta) {
  validate(d);
  double total = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (code.syndrome(d.H.row(k)) != 0) continue;
    const double bias = std::pow(1.0 - eta, static_cast<double>(weight(d.H.row(k))));
    total += d.b[k] ? -bias : bias;
  }
  return total;
}

void finalize(GapReport& r) {
  const auto T = static_cast<double>(r.sums.trials);
  if (r.sums.trials == 0) {
    r.mean_lpn = r.mean_uniform = r.gap = r.sigma = r.ci = 0.0;
  } else {
    r.mean_lpn = static_cast<double>(r.sums.sum_lpn) / T;
    r.mean_uniform = static_cast<double>(r.sums.sum_uniform) / T;
    r.gap = r.mean_lpn - r.mean_uniform;
    const double var_l = std::max(0.0, static_cast<double>(r.sums.sumsq_lpn) / T - r.mean_lpn * r.mean_lpn);
    const double var_u =
        std::max(0.0, static_cast<double>(r.sums.sumsq_uniform) / T - r.mean_uniform * r.mean_uniform);
    r.sigma = std::sqrt(var_l / T + var_u / T);
    // Each statistic lies in [-N, N]; the two means get half the failure probability each.
    const double range = 2.0 * static_cast<double>(r.N);
    r.ci = 2.0 * range * std::sqrt(std::log(4.0 / (1.0 - r.confidence)) / (2.0 * T));
  }
  r.bound = static_cast<double>(r.N) * std::exp(-r.eta * static_cast<double>(r.dual_distance));
}

GapReport gap_experiment(const LinearCode& code, const ThresholdDistinguisher& d, double eta, std::uint64_t trials,
                         const RngStream& base, std::size_t dual_distance, Exec exec) {
  validate(d);
  if (d.length() != code.m()) throw LengthMismatch(d.length(), code.m());
  GapReport r;
  r.n = code.n();
  r.m = code.m();
  r.dual_distance = dual_distance;
  r.eta = eta;
  r.N = d.size();
  r.sums = kernels::gap_sums(code, d.H, d.b, eta, trials, base, exec);
  r.predicted = predicted_mean_lpn(code, d, eta);
  // Uniform words only see constant rows; those cancel in the gap.
  for (std::size_t k = 0; k < d.size(); ++k)
    if (weight(d.H.row(k)) == 0) r.predicted += d.b[k] ? 1.0 : -1.0;
  finalize(r);
  return r;
}

BitMatrix random_dual_rows(const LinearCode& code, std::size_t count, std::size_t wt, RngStream& rng,
                           std::uint64_t max_trials) {
  if (wt > code.m()) throw std::invalid_argument("row weight exceeds blocklength");
  if (max_trials == 0) max_trials = std::uint64_t{1} << std::min<std::size_t>(code.n() + 20, 62);
  const auto syn = code.column_syndromes();
  BitMatrix out(count, code.m());
  std::vector<std::size_t> support;
  for (std::size_t r = 0; r < count; ++r) {
    std::uint64_t tries = 0;
    for (;;) {
      if (++tries > max_trials)
        throw std::runtime_error("random_dual_rows: no weight-" + std::to_string(wt) + " dual codeword after " +
                                 std::to_string(max_trials) + " draws");
      support.clear();
      std::uint64_t s = 0;
      while (support.size() < wt) {
        const auto c = static_cast<std::size_t>(rng.next_index(code.m()));
        if (std::find(support.begin(), support.end(), c) != support.end()) continue;
        support.push_back(c);
        s ^= syn[c];
      }
      if (s == 0) break;
    }
    for (std::size_t c : support) out.set(r, c);
  }
  return out;
}

}  // namespace ncp

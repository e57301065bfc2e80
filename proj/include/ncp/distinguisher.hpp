#pragma once

// Threshold and k-interval distinguishers over affine parity tests, the
// algebra that turns an interval test into a threshold test, and the Monte
// Carlo bias experiment comparing noisy codewords with uniform words.

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ncp/codes.hpp"
#include "ncp/exec.hpp"
#include "ncp/f2.hpp"
#include "ncp/kernels.hpp"
#include "ncp/rng.hpp"

namespace ncp {

/// Row budget for subtract_constant, multiply and compile_interval.
inline constexpr std::size_t kDistinguisherBudget = std::size_t{1} << 24;

class NotThresholdExpressible : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class BudgetExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

enum class Direction { AcceptAbove, AcceptBelow };

/// Statistic A_{H,b}(w) = Σ_i (-1)^{<h_i, w> + b_i}. AcceptAbove accepts
/// A >= T and AcceptBelow accepts A <= T.
struct ThresholdDistinguisher {
  BitMatrix H;
  BitVec b;
  std::int64_t T = 0;
  Direction direction = Direction::AcceptAbove;

  std::size_t size() const { return H.rows(); }
  std::size_t length() const { return H.cols(); }
};

/// Intervals are I_0 = [-N, a_1], I_j = [a_j, a_{j+1}], I_{k-1} = [a_{k-1}, N];
/// accept[j] says whether I_j accepts. A value on a breakpoint accepts when
/// either neighbouring interval does.
struct IntervalDistinguisher {
  BitMatrix H;
  BitVec b;
  std::vector<std::int64_t> breakpoints;  // strictly increasing, k - 1 of them
  std::vector<bool> accept;               // k entries

  std::size_t size() const { return H.rows(); }
  std::size_t length() const { return H.cols(); }
  std::size_t intervals() const { return accept.size(); }
};

/// Checks b.len == H.rows (and, for intervals, breakpoint order and count).
void validate(const ThresholdDistinguisher& d);
void validate(const IntervalDistinguisher& d);

std::int64_t eval_statistic(const BitMatrix& H, BitRef b, BitRef w, Exec exec = Exec::Serial);
std::int64_t eval_statistic(const ThresholdDistinguisher& d, BitRef w, Exec exec = Exec::Serial);
std::int64_t eval_statistic(const IntervalDistinguisher& d, BitRef w, Exec exec = Exec::Serial);

bool accepts(const ThresholdDistinguisher& d, BitRef w, Exec exec = Exec::Serial);
bool accepts(const IntervalDistinguisher& d, BitRef w, Exec exec = Exec::Serial);

/// A'(w) = A(w) - a, by appending |a| zero rows with shift bit 1 (a > 0) or 0 (a < 0).
ThresholdDistinguisher subtract_constant(const ThresholdDistinguisher& d, std::int64_t a);

/// A'(w) = A_1(w)·A_2(w): rows h ⊕ h' and shifts b ⊕ b' over all pairs.
ThresholdDistinguisher multiply(const ThresholdDistinguisher& d1, const ThresholdDistinguisher& d2);

/// Threshold distinguisher whose statistic is Π_i (A(w) - a_i), compared with 0.
/// Throws NotThresholdExpressible unless accept alternates between neighbours.
ThresholdDistinguisher compile_interval(const IntervalDistinguisher& d);

/// (2N)^{k-1}, saturating at SIZE_MAX.
std::size_t compiled_size_bound(std::size_t N, std::size_t k);

struct LpnSample {
  BitVec x;
  BitVec e;
  BitVec w;  // C·x + e
};

/// x uniform (next_bits(n)), then each bit of e independently Ber(eta/2).
/// eta = 2 makes e the all-ones vector.
LpnSample lpn_sample(const LinearCode& code, double eta, RngStream& rng);

struct GapReport {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t dual_distance = 0;
  double eta = 0.0;
  std::size_t N = 0;
  GapSums sums;

  double mean_lpn = 0.0;
  double mean_uniform = 0.0;
  double gap = 0.0;
  double sigma = 0.0;      // standard error of the gap from the sample variances
  double predicted = 0.0;  // Σ over rows in C^⊥ \ {0} of (-1)^{b_i}(1-η)^{wt(h_i)}
  double bound = 0.0;      // N·exp(-η·d)
  double ci = 0.0;         // Hoeffding radius on the gap at level `confidence`
  double confidence = 0.95;
};

/// Recomputes every float field of the report from its raw sums.
void finalize(GapReport& r);

/// Trial j draws an LPN word and a uniform word from base.substream(j).
GapReport gap_experiment(const LinearCode& code, const ThresholdDistinguisher& d, double eta, std::uint64_t trials,
                         const RngStream& base, std::size_t dual_distance, Exec exec = Exec::Parallel);

/// Expected statistic on a LPN word, by the per-row bias formula.
double predicted_mean_lpn(const LinearCode& code, const ThresholdDistinguisher& d, double eta);

/// `count` dual codewords of weight exactly `weight`, each found by rejection
/// on a uniformly random support. Throws after `max_trials` misses per row.
BitMatrix random_dual_rows(const LinearCode& code, std::size_t count, std::size_t weight, RngStream& rng,
                           std::uint64_t max_trials = 0);

}  // namespace ncp

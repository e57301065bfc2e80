#pragma once

// Nearest-codeword decoding with preprocessing: parameter selection, the
// threshold decision rule, bit-flip error search, and search via a decision
// oracle on the n subcodes with one column removed.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ncp/codes.hpp"
#include "ncp/dist.hpp"
#include "ncp/exec.hpp"
#include "ncp/f2.hpp"

namespace ncp {

enum class DecoderMode { Decision, Search };

struct DecoderParams {
  DecoderMode mode = DecoderMode::Decision;
  std::size_t n = 0;
  std::size_t m = 0;
  double beta = 0.0;
  double eta = 0.0;
  double alpha = 0.0;  // beta + 2·eta
  unsigned ell = 0;
  std::uint64_t N_theory = 0;
  std::uint64_t N_used = 0;
  double t = 0.0;      // decision threshold (decision mode)
  double delta = 0.0;  // gap the advice must resolve

  DistParams dist() const { return DistParams::make(m, ell); }
  /// Recomputes ell, t, delta and N_theory from (n, m, beta, eta) and compares.
  bool consistent() const;
};

/// Statistics are signed 64-bit; advice beyond 2^62 rows is rejected.
inline constexpr std::uint64_t kMaxAdviceRows = std::uint64_t{1} << 62;

/// Requires 0 < beta, eta < 1/6. ell = 2⌈n/log2(1/β)⌉, e = n/log2(1/β) + 1,
/// t = (1/3)(1−2η)^{2e}, δ = t/2, N = ⌈72m(1−2η)^{−4e}⌉.
DecoderParams decision_params(std::size_t n, std::size_t m, double beta, double eta);

/// Requires 1/m <= beta, eta < 1/8. α = β + 2η, ell = 2⌈n/log2(1/α)⌉,
/// δ = (ℓ/m)(1−4η)^ℓ, N = ⌈8m/δ²⌉.
DecoderParams search_params(std::size_t n, std::size_t m, double beta, double eta);

/// min(N_theory, ⌈c·(m/ℓ)²·ln m⌉): per-instance advice size for experiments.
std::uint64_t calibrated_rows(const DecoderParams& p, double c = 32.0);

DecoderParams with_rows(DecoderParams p, std::uint64_t rows);

/// ½(1−2η)^{2(n/log2(1/β)+1)}: lower bound on D̂_C over close words.
double close_bound(const DecoderParams& p);
/// 2^{-n}: upper bound on D̂_C over separated words.
double separated_bound(const DecoderParams& p);

/// Statistic of w against the advice: Σ_i (-1)^{<h_i, w> + b_i}.
std::int64_t advice_statistic(BitRef w, const Advice& advice, Exec exec = Exec::Parallel);

/// ⌊t·N⌋ computed exactly from the binary value of t; S > t·N iff S > ⌊t·N⌋.
std::int64_t threshold_floor(double t, std::uint64_t N);

enum class Decision { Yes, No };

const char* to_string(Decision d);

Decision decide(BitRef w, const Advice& advice, const DecoderParams& params, Exec exec = Exec::Parallel);

struct SearchOutcome {
  std::optional<BitVec> message;  // nullopt: DecodeFailure (C·x = w + ê inconsistent)
  BitVec error_estimate;
  std::int64_t statistic = 0;
  std::vector<std::int64_t> flipped;     // statistic of w with bit i flipped
  std::vector<std::size_t> untouched;    // coordinates outside every advice row's support
};

/// One pass over the advice computes S and, for every coordinate i, the
/// statistic of w^{(i)} as S − 2·Σ_{k : h_ki = 1} (-1)^{<h_k, w> + b_k}.
/// ê_i = 0 exactly when the flipped statistic is strictly below S.
SearchOutcome search(BitRef w, const Advice& advice, const LinearCode& code, Exec exec = Exec::Parallel);

/// Oracle for the decision problem on a subcode at separation `beta`, closeness `eta`.
using DecisionOracle = std::function<Decision(const LinearCode& subcode, BitRef w, double beta, double eta)>;

struct ReductionOutcome {
  BitVec message;
  std::size_t oracle_calls = 0;
};

/// x̂_i = 0 iff the oracle answers Yes on (C with column i removed, w) at
/// separation beta + 2·eta.
ReductionOutcome search_via_decision(BitRef w, const LinearCode& code, const DecisionOracle& oracle, double beta,
                                     double eta);

/// Decides by comparing the exact D̂_C(w) of the subcode with decision_params' t.
DecisionOracle exact_decision_oracle(Exec exec = Exec::Parallel);

/// Decides with sampled advice, built once per subcode and cached by code hash.
class AdviceDecisionOracle {
 public:
  struct Options {
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> rows;  // overrides N_theory
    AdviceOptions advice;
  };

  explicit AdviceDecisionOracle(Options opts) : opts_(std::move(opts)) {}

  Decision operator()(const LinearCode& subcode, BitRef w, double beta, double eta);

  /// Builds (or returns the cached) advice and parameters for a subcode.
  const std::pair<DecoderParams, Advice>& prepare(const LinearCode& subcode, double beta, double eta);
  std::size_t cached() const { return cache_.size(); }

 private:
  Options opts_;
  std::map<std::string, std::pair<DecoderParams, Advice>> cache_;
};

}  // namespace ncp

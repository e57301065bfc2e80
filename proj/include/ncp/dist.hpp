#pragma once

// The distribution D (XOR of ℓ uniform unit vectors of length m), its
// restriction D_C to the dual code, and the advice matrices built from D_C.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncp/codes.hpp"
#include "ncp/exec.hpp"
#include "ncp/f2.hpp"
#include "ncp/kernels.hpp"
#include "ncp/rng.hpp"

namespace ncp {

/// Largest blocklength for the Krawtchouk inversion in exact_pmf_D.
inline constexpr std::size_t kPmfMaxLength = 64;
/// Largest dual dimension m − n for the enumerated D_C table.
inline constexpr std::size_t kExactTableMaxDualDim = 20;

struct DistParams {
  std::size_t m = 0;
  unsigned ell = 0;

  /// Throws for m == 0 or odd ell.
  static DistParams make(std::size_t m, unsigned ell);
};

class SamplerExhausted : public std::runtime_error {
 public:
  SamplerExhausted(std::uint64_t trials, std::uint64_t accepted, std::uint64_t row);
  std::uint64_t trials() const { return trials_; }
  std::uint64_t accepted() const { return accepted_; }
  double acceptance_rate() const { return trials_ ? static_cast<double>(accepted_) / trials_ : 0.0; }

 private:
  std::uint64_t trials_;
  std::uint64_t accepted_;
};

BitVec sample_D(const DistParams& params, RngStream& rng);

/// D̂(w) = (1 − 2·wt(w)/m)^ℓ.
double fourier_D(const DistParams& params, std::size_t w_weight);

/// Probability that a D sample equals one fixed vector of weight w_weight.
double exact_pmf_D(const DistParams& params, std::size_t w_weight);

/// Σ_v D̂(v + w) over all 2^n codewords v, via the coset weight histogram.
long double fourier_coset_sum(const LinearCode& code, const DistParams& params, BitRef w,
                              Exec exec = Exec::Parallel);

/// D̂_C(w) = Σ_v D̂(v + w) / Σ_v D̂(v).
double fourier_DC_exact(const LinearCode& code, const DistParams& params, BitRef w, Exec exec = Exec::Parallel);

/// Z_C = 2^{-n} Σ_v D̂(v): the probability that a D sample lands in the dual code.
double dual_mass(const LinearCode& code, const DistParams& params, Exec exec = Exec::Parallel);

/// 2^{n+7}: a rejection run this long signals a bug or wrong parameters.
std::uint64_t default_max_trials(const LinearCode& code);

/// One D_C draw by rejection on incrementally accumulated n-bit syndromes.
/// max_trials == 0 selects default_max_trials.
BitVec sample_DC_rejection(const LinearCode& code, const DistParams& params, RngStream& rng,
                           std::uint64_t max_trials = 0, SamplerStats* stats = nullptr);

/// Enumerated D_C: every dual codeword with nonzero mass and its probability.
class ExactDCTable {
 public:
  ExactDCTable(const LinearCode& code, const DistParams& params);

  std::size_t size() const { return words_.size(); }
  const BitVec& word(std::size_t i) const { return words_[i]; }
  double probability(std::size_t i) const { return probs_[i]; }
  double total_mass() const { return total_; }
  /// Probability of h, zero when h is not in the table.
  double probability_of(BitRef h) const;

  BitVec sample(RngStream& rng) const;

 private:
  std::vector<BitVec> words_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
  double total_ = 0.0;
};

BitVec sample_DC_exact(const LinearCode& code, const DistParams& params, RngStream& rng);

enum class AdviceSampler { Rejection, Exact };

struct Advice {
  BitMatrix rows;  // N × m
  BitVec shifts;   // N bits
  unsigned ell = 0;
  std::uint64_t seed = 0;
  std::string code_hash;
  SamplerStats stats;
  std::optional<double> beta;  // parameters the advice was sized for, when known
  std::optional<double> eta;

  std::size_t size() const { return rows.rows(); }
  std::size_t length() const { return rows.cols(); }
};

struct AdviceOptions {
  AdviceSampler sampler = AdviceSampler::Rejection;
  Exec exec = Exec::Parallel;
  std::uint64_t max_trials = 0;
};

/// N independent D_C rows; row i draws from RngStream(seed, i), so the
/// result does not depend on the execution policy.
Advice make_advice(const LinearCode& code, const DistParams& params, std::size_t N, std::uint64_t seed,
                   const AdviceOptions& options = {});

// Advice file: "ncp-advice v1 N=<N> m=<m> l=<ell> seed=<seed> code=<hash>",
// optionally followed by " beta=<b> eta=<e>", then N lines "<h-bits> <b-bit>".
void write_advice(std::ostream& out, const Advice& advice);
Advice read_advice(std::istream& in);
Advice load_advice(const std::string& path);
void save_advice(const std::string& path, const Advice& advice);

}  // namespace ncp

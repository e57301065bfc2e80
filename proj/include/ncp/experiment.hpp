#pragma once

// End-to-end experiment drivers. A run is a sequence of trials; consecutive
// groups of `instances_per_code` trials share one code and one advice. Every
// random choice of trial t is a pure function of (config, t), so any CSV row
// can be reproduced alone with run_trial.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ncp/codes.hpp"
#include "ncp/decoder.hpp"
#include "ncp/dist.hpp"
#include "ncp/distinguisher.hpp"
#include "ncp/exec.hpp"

namespace ncp {

enum class ExperimentMode { Decide, Search, Reduce, LowerBound };

const char* to_string(ExperimentMode mode);
ExperimentMode parse_mode(const std::string& s);

enum class ReduceOracle { Advice, Exact };

struct ExperimentConfig {
  ExperimentMode mode = ExperimentMode::Decide;
  std::size_t n = 4;
  std::size_t m = 64;
  double eta = 0.01;
  std::optional<double> beta;  // default: max(beta_star, 1/m)
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  std::size_t instances_per_code = 1;
  std::optional<std::uint64_t> rows;  // advice size override
  double calibration = 32.0;          // search default rows: min(N_theory, c·(m/ℓ)²·ln m)
  AdviceSampler sampler = AdviceSampler::Rejection;
  ReduceOracle reduce_oracle = ReduceOracle::Advice;
  std::uint64_t gap_trials = 10000;        // lower-bound: Monte Carlo trials per code
  std::optional<std::size_t> row_weight;   // lower-bound: default the dual distance
  std::size_t dual_distance_cap = 8;
  std::size_t max_code_attempts = 1000;
  std::string advice_cache;  // directory; empty disables the cache
  bool timing = true;
  Exec exec = Exec::Parallel;
};

/// Throws std::invalid_argument when the config cannot run in its mode.
void validate(const ExperimentConfig& config);

struct ResultRecord {
  ExperimentMode mode = ExperimentMode::Decide;
  std::size_t n = 0;
  std::size_t m = 0;
  double eta = 0.0;
  double beta = 0.0;
  std::uint64_t trial = 0;
  std::string instance;  // yes | no | noisy
  double beta_star = 0.0;
  bool audit_estimated = false;
  std::optional<std::size_t> dual_distance;  // nullopt: above dual_distance_cap
  std::size_t dual_distance_cap = 8;
  unsigned ell = 0;
  std::uint64_t N_theory = 0;
  std::uint64_t N_used = 0;
  std::uint64_t successes = 0;
  std::uint64_t trials = 1;
  std::string status;  // ok | fail | decode_failure | error
  std::optional<bool> oracle_match;
  std::optional<double> preprocess_s;
  std::optional<double> online_s;
  std::uint64_t seed = 0;

  bool success() const { return successes == trials && trials > 0; }
};

std::string csv_header();
std::string to_csv(const ResultRecord& r);

/// Lower-bound rows: n,m,dual_distance,eta,N,mean_lpn,mean_uniform,bound,ci,predicted,sigma,trials,seed.
std::string gap_csv_header();
std::string to_csv(const GapReport& r, std::uint64_t seed);

/// Everything shared by the trials of one code group.
struct GroupContext {
  std::uint64_t group = 0;
  std::optional<LinearCode> code;
  BalanceAudit audit;
  std::optional<std::size_t> dual_distance;
  DecoderParams params;
  std::optional<Advice> advice;              // decide / search
  std::optional<AdviceDecisionOracle> reduce;  // reduce with sampled advice
  std::optional<double> preprocess_s;
  std::string error;  // non-empty: every trial of the group is recorded as an error
};

GroupContext prepare_group(const ExperimentConfig& config, std::uint64_t group);
ResultRecord run_instance(const ExperimentConfig& config, GroupContext& ctx, std::uint64_t trial);

/// Reproduces trial t of the run from scratch.
ResultRecord run_trial(const ExperimentConfig& config, std::uint64_t trial);

/// Runs all trials in index order, handing each record to `sink`.
void run_experiment(const ExperimentConfig& config, const std::function<void(const ResultRecord&)>& sink);

/// Header plus one line per trial.
void write_experiment_csv(std::ostream& out, const ExperimentConfig& config);

/// One gap report per trial: a fresh code with its dual distance and
/// `rows` dual codewords of weight `row_weight` (default d).
void run_lower_bound(const ExperimentConfig& config, const std::function<void(const GapReport&)>& sink);

struct BenchRecord {
  DecoderMode mode = DecoderMode::Decision;
  std::size_t n = 0;
  std::size_t m = 0;
  double eta = 0.0;
  double beta = 0.0;
  unsigned ell = 0;
  std::uint64_t N_theory = 0;
  std::uint64_t N_used = 0;
  std::uint64_t advice_bytes = 0;
  double preprocess_s = 0.0;
  double online_s = 0.0;  // mean over the online queries
  double trials_per_accept = 0.0;
  double formula_advice = 0.0;  // m^2·exp(ηn/log2(1/β)) or (m^4 log2²(1/α)/n²)·exp(ηn/log2(1/α))
  std::uint64_t seed = 0;
};

/// Size of an advice file's body: N rows of m + 1 bits, byte-framed per row.
std::uint64_t advice_bytes(std::uint64_t N, std::size_t m);

std::string bench_csv_header();
std::string to_csv(const BenchRecord& r);

/// Measures preprocessing and `queries` online calls for one code; mode
/// Decide or Search.
BenchRecord bench(const ExperimentConfig& config, std::uint64_t queries = 10);

/// Path of the cached advice for (code hash, ell, N, seed) under `dir`.
std::string advice_cache_path(const std::string& dir, const std::string& code_hash, unsigned ell, std::uint64_t N,
                              std::uint64_t seed);

/// Loads the cached advice or builds and stores it.
Advice cached_advice(const std::string& dir, const LinearCode& code, const DistParams& params, std::uint64_t N,
                     std::uint64_t seed, const AdviceOptions& options);

}  // namespace ncp

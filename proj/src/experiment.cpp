#include "ncp/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ncp/baselines.hpp"

namespace ncp {

namespace {

enum Tag : std::uint64_t { kTagCode = 1, kTagAdvice = 2, kTagInstance = 3 };

constexpr std::uint64_t kMaxInstanceDraws = 100000;

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string opt_csv(const std::optional<double>& v) { return v ? format_double(*v) : "na"; }

double balance_bound(const ExperimentConfig& c) {
  switch (c.mode) {
    case ExperimentMode::Decide: return 1.0 / 6.0;
    case ExperimentMode::Search: return 1.0 / 8.0;
    case ExperimentMode::Reduce: return 1.0 / 6.0 - 2.0 * c.eta;
    case ExperimentMode::LowerBound: return 1.0;
  }
  return 1.0;
}

BitVec uniform_word(std::size_t m, RngStream& rng) {
  BitVec r(m);
  for (auto& w : r.words()) w = rng.next_u64();
  r.words().back() &= tail_mask(m);
  return r;
}

/// Error of weight exactly `wt` on uniformly chosen distinct positions.
BitVec fixed_weight_error(std::size_t m, std::size_t wt, RngStream& rng) {
  BitVec e(m);
  std::size_t placed = 0;
  while (placed < wt) {
    const auto i = static_cast<std::size_t>(rng.next_index(m));
    if (e[i]) continue;
    e.set(i);
    ++placed;
  }
  return e;
}

std::string instance_label(ExperimentMode mode, std::uint64_t trial) {
  if (mode == ExperimentMode::Decide) return trial % 2 == 0 ? "yes" : "no";
  return "noisy";
}

}  // namespace

const char* to_string(ExperimentMode mode) {
  switch (mode) {
    case ExperimentMode::Decide: return "decide";
    case ExperimentMode::Search: return "search";
    case ExperimentMode::Reduce: return "reduce";
    case ExperimentMode::LowerBound: return "lower-bound";
  }
  return "?";
}

ExperimentMode parse_mode(const std::string& s) {
  if (s == "decide") return ExperimentMode::Decide;
  if (s == "search") return ExperimentMode::Search;
  if (s == "reduce") return ExperimentMode::Reduce;
  if (s == "lower-bound") return ExperimentMode::LowerBound;
  throw std::invalid_argument("unknown mode '" + s + "' (decide|search|reduce|lower-bound)");
}

void validate(const ExperimentConfig& c) {
  if (!(c.n >= 1 && c.m > c.n)) throw std::invalid_argument("need m > n >= 1");
  if (c.n > kMaxMessageBits) throw std::invalid_argument("n above 64 is not supported");
  if (c.instances_per_code < 1) throw std::invalid_argument("instances_per_code must be >= 1");
  if (c.rows && (*c.rows < 1 || *c.rows > kMaxAdviceRows)) throw std::invalid_argument("rows must be in [1, 2^62]");
  // A probe with the smallest admissible beta catches range errors before any sampling.
  const double probe = c.beta.value_or(1.0 / static_cast<double>(c.m));
  switch (c.mode) {
    case ExperimentMode::Decide: decision_params(c.n, c.m, probe, c.eta); break;
    case ExperimentMode::Search: search_params(c.n, c.m, probe, c.eta); break;
    case ExperimentMode::Reduce:
      if (c.n < 2) throw std::invalid_argument("reduce needs n >= 2");
      decision_params(c.n - 1, c.m, probe + 2.0 * c.eta, c.eta);
      break;
    case ExperimentMode::LowerBound:
      if (!(c.eta >= 0.0 && c.eta <= 1.0)) throw std::invalid_argument("lower-bound: eta must lie in [0, 1]");
      break;
  }
}

std::string csv_header() {
  return "mode,n,m,eta,beta,trial,instance,beta_star,audit,dual_distance,ell,N_theory,N_used,successes,trials,"
         "status,oracle_match,preprocess_s,online_s,seed";
}

std::string to_csv(const ResultRecord& r) {
  std::ostringstream os;
  os << to_string(r.mode) << ',' << r.n << ',' << r.m << ',' << format_double(r.eta) << ','
     << format_double(r.beta) << ',' << r.trial << ',' << r.instance << ',' << format_double(r.beta_star) << ','
     << (r.audit_estimated ? "estimated" : "exact") << ',';
  if (r.dual_distance) {
    os << *r.dual_distance;
  } else {
    os << "gt" << r.dual_distance_cap;
  }
  os << ',' << r.ell << ',' << r.N_theory << ',' << r.N_used << ',' << r.successes << ',' << r.trials << ','
     << r.status << ',' << (r.oracle_match ? (*r.oracle_match ? "1" : "0") : "na") << ',' << opt_csv(r.preprocess_s)
     << ',' << opt_csv(r.online_s) << ',' << r.seed;
  return os.str();
}

std::string gap_csv_header() { return "n,m,dual_distance,eta,N,mean_lpn,mean_uniform,bound,ci,predicted,sigma,trials,seed"; }

std::string to_csv(const GapReport& r, std::uint64_t seed) {
  std::ostringstream os;
  os << r.n << ',' << r.m << ',' << r.dual_distance << ',' << format_double(r.eta) << ',' << r.N << ','
     << format_double(r.mean_lpn) << ',' << format_double(r.mean_uniform) << ',' << format_double(r.bound) << ','
     << format_double(r.ci) << ',' << format_double(r.predicted) << ',' << format_double(r.sigma) << ','
     << r.sums.trials << ',' << seed;
  return os.str();
}

std::string advice_cache_path(const std::string& dir, const std::string& code_hash, unsigned ell, std::uint64_t N,
                              std::uint64_t seed) {
  return (std::filesystem::path(dir) / ("advice-" + code_hash + "-l" + std::to_string(ell) + "-N" +
                                        std::to_string(N) + "-s" + std::to_string(seed) + ".txt"))
      .string();
}

Advice cached_advice(const std::string& dir, const LinearCode& code, const DistParams& params, std::uint64_t N,
                     std::uint64_t seed, const AdviceOptions& options) {
  const std::string path = advice_cache_path(dir, code.hash(), params.ell, N, seed);
  if (std::filesystem::exists(path)) {
    Advice a = load_advice(path);
    if (a.code_hash == code.hash() && a.ell == params.ell && a.size() == N && a.seed == seed &&
        a.length() == code.m())
      return a;
  }
  Advice a = make_advice(code, params, N, seed, options);
  std::filesystem::create_directories(dir);
  save_advice(path, a);
  return a;
}

GroupContext prepare_group(const ExperimentConfig& c, std::uint64_t group) {
  GroupContext ctx;
  ctx.group = group;
  try {
    RngStream rng(derive_seed(c.seed, kTagCode, group), 0);
    const double bound = balance_bound(c);
    for (std::size_t attempt = 0; attempt < c.max_code_attempts && !ctx.code; ++attempt) {
      LinearCode code = random_code(c.m, c.n, rng);
      BalanceAudit audit =
          c.n <= kEnumerationCap ? audit_balance(code, kEnumerationCap, c.exec) : estimate_balance(code, 4096, rng);
      if (audit.beta_star < bound && (!c.beta || audit.beta_star <= *c.beta)) {
        ctx.code = std::move(code);
        ctx.audit = audit;
      }
    }
    if (!ctx.code)
      throw std::runtime_error("no code passed the balance audit in " + std::to_string(c.max_code_attempts) +
                               " draws");
    const LinearCode& code = *ctx.code;
    ctx.dual_distance = dual_distance(code, c.dual_distance_cap);
    const double beta = c.beta.value_or(std::max(ctx.audit.beta_star, 1.0 / static_cast<double>(c.m)));
    const std::uint64_t advice_seed = derive_seed(c.seed, kTagAdvice, group);
    const AdviceOptions opts{c.sampler, c.exec, 0};

    Stopwatch sw;
    switch (c.mode) {
      case ExperimentMode::Decide:
      case ExperimentMode::Search: {
        DecoderParams p = c.mode == ExperimentMode::Decide ? decision_params(c.n, c.m, beta, c.eta)
                                                           : search_params(c.n, c.m, beta, c.eta);
        if (c.rows) {
          p = with_rows(p, *c.rows);
        } else if (c.mode == ExperimentMode::Search) {
          p = with_rows(p, calibrated_rows(p, c.calibration));
        }
        ctx.params = p;
        ctx.advice = c.advice_cache.empty() ? make_advice(code, p.dist(), p.N_used, advice_seed, opts)
                                            : cached_advice(c.advice_cache, code, p.dist(), p.N_used, advice_seed, opts);
        break;
      }
      case ExperimentMode::Reduce: {
        ctx.params = decision_params(c.n - 1, c.m, beta + 2.0 * c.eta, c.eta);
        if (c.rows) ctx.params = with_rows(ctx.params, *c.rows);
        ctx.params.beta = beta;
        if (c.reduce_oracle == ReduceOracle::Advice) {
          ctx.reduce.emplace(AdviceDecisionOracle::Options{advice_seed, c.rows, opts});
          for (std::size_t i = 0; i < c.n; ++i) ctx.reduce->prepare(code.drop_column(i), beta + 2.0 * c.eta, c.eta);
        }
        break;
      }
      case ExperimentMode::LowerBound: throw std::invalid_argument("lower-bound runs through run_lower_bound");
    }
    if (c.timing) ctx.preprocess_s = sw.seconds();
  } catch (const std::exception& e) {
    ctx.error = e.what();
  }
  return ctx;
}

ResultRecord run_instance(const ExperimentConfig& c, GroupContext& ctx, std::uint64_t trial) {
  ResultRecord r;
  r.mode = c.mode;
  r.n = c.n;
  r.m = c.m;
  r.eta = c.eta;
  r.trial = trial;
  r.instance = instance_label(c.mode, trial);
  r.seed = c.seed;
  r.dual_distance_cap = c.dual_distance_cap;
  r.preprocess_s = ctx.preprocess_s;
  if (!ctx.code) {
    r.beta = c.beta.value_or(0.0);
    r.status = "error";
    return r;
  }
  const LinearCode& code = *ctx.code;
  r.beta_star = ctx.audit.beta_star;
  r.audit_estimated = ctx.audit.estimated;
  r.dual_distance = ctx.dual_distance;
  r.beta = ctx.params.beta;
  r.ell = ctx.params.ell;
  r.N_theory = ctx.params.N_theory;
  r.N_used = ctx.params.N_used;
  if (!ctx.error.empty()) {
    r.status = "error";
    return r;
  }
  const bool can_enumerate = code.n() <= kEnumerationCap;

  try {
    RngStream rng(derive_seed(c.seed, kTagInstance, trial), 0);
    const double beta = ctx.params.beta;
    if (c.mode == ExperimentMode::Decide) {
      const bool yes = r.instance == "yes";
      BitVec w(code.m());
      if (yes) {
        const BitVec x = BitVec::from_uint(code.n(), rng.next_bits(static_cast<unsigned>(code.n())));
        BitVec e(code.m());
        for (std::uint64_t draw = 0;; ++draw) {
          if (draw == kMaxInstanceDraws) throw std::runtime_error("no error pattern of weight <= eta*m");
          e = BitVec(code.m());
          for (std::size_t i = 0; i < code.m(); ++i)
            if (rng.next_bernoulli(c.eta)) e.set(i);
          if (static_cast<double>(weight(e)) <= c.eta * static_cast<double>(code.m())) break;
        }
        w = code.encode(x);
        w ^= e;
      } else {
        for (std::uint64_t draw = 0;; ++draw) {
          if (draw == kMaxInstanceDraws) throw std::runtime_error("no beta-separated uniform word found");
          w = uniform_word(code.m(), rng);
          if (!can_enumerate ||
              closeness_class(code, w, c.eta, beta, kEnumerationCap, c.exec) == Closeness::Separated)
            break;
        }
      }
      Stopwatch sw;
      const Decision d = decide(w, *ctx.advice, ctx.params, c.exec);
      if (c.timing) r.online_s = sw.seconds();
      const bool ok = (d == Decision::Yes) == yes;
      r.successes = ok ? 1 : 0;
      r.status = ok ? "ok" : "fail";
      if (can_enumerate) {
        const Closeness cls = closeness_class(code, w, c.eta, beta, kEnumerationCap, c.exec);
        r.oracle_match = yes ? cls == Closeness::Close : cls == Closeness::Separated;
      }
      return r;
    }

    const BitVec x = BitVec::from_uint(code.n(), rng.next_bits(static_cast<unsigned>(code.n())));
    const auto errors = static_cast<std::size_t>(std::floor(c.eta * static_cast<double>(code.m())));
    BitVec w = code.encode(x);
    w ^= fixed_weight_error(code.m(), errors, rng);

    std::optional<BitVec> found;
    Stopwatch sw;
    if (c.mode == ExperimentMode::Search) {
      found = search(w, *ctx.advice, code, c.exec).message;
    } else if (c.reduce_oracle == ReduceOracle::Exact) {
      found = search_via_decision(w, code, exact_decision_oracle(c.exec), beta, c.eta).message;
    } else {
      AdviceDecisionOracle& oracle = *ctx.reduce;
      const DecisionOracle call = [&oracle](const LinearCode& s, BitRef v, double b, double e) {
        return oracle(s, v, b, e);
      };
      found = search_via_decision(w, code, call, beta, c.eta).message;
    }
    if (c.timing) r.online_s = sw.seconds();

    if (!found) {
      r.status = "decode_failure";
      return r;
    }
    bool ok = *found == x;
    if (can_enumerate) {
      const OracleResult ref = exhaustive_nearest(code, w, kEnumerationCap, c.exec);
      r.oracle_match = ref.x_star == *found;
      ok = ok && ref.x_star == x;
    }
    r.successes = ok ? 1 : 0;
    r.status = ok ? "ok" : "fail";
  } catch (const std::exception&) {
    r.status = "error";
  }
  return r;
}

ResultRecord run_trial(const ExperimentConfig& c, std::uint64_t trial) {
  validate(c);
  GroupContext ctx = prepare_group(c, trial / c.instances_per_code);
  return run_instance(c, ctx, trial);
}

void run_experiment(const ExperimentConfig& c, const std::function<void(const ResultRecord&)>& sink) {
  validate(c);
  if (c.mode == ExperimentMode::LowerBound) throw std::invalid_argument("lower-bound runs through run_lower_bound");
  std::optional<GroupContext> ctx;
  for (std::uint64_t t = 0; t < c.trials; ++t) {
    const std::uint64_t g = t / c.instances_per_code;
    if (!ctx || ctx->group != g) {
      ctx.reset();
      ctx = prepare_group(c, g);
    }
    sink(run_instance(c, *ctx, t));
  }
}

void write_experiment_csv(std::ostream& out, const ExperimentConfig& c) {
  if (c.mode == ExperimentMode::LowerBound) {
    out << gap_csv_header() << '\n';
    run_lower_bound(c, [&](const GapReport& r) { out << to_csv(r, c.seed) << '\n' << std::flush; });
    return;
  }
  out << csv_header() << '\n';
  run_experiment(c, [&](const ResultRecord& r) { out << to_csv(r) << '\n' << std::flush; });
}

void run_lower_bound(const ExperimentConfig& c, const std::function<void(const GapReport&)>& sink) {
  validate(c);
  for (std::uint64_t t = 0; t < c.trials; ++t) {
    RngStream rng(derive_seed(c.seed, kTagCode, t), 0);
    const LinearCode code = random_code(c.m, c.n, rng);
    const auto d = dual_distance(code, c.dual_distance_cap);
    if (!d)
      throw std::runtime_error("dual distance exceeds cap " + std::to_string(c.dual_distance_cap) +
                               "; raise the cap or pass a row weight");
    ThresholdDistinguisher dist;
    dist.H = random_dual_rows(code, c.rows.value_or(16), c.row_weight.value_or(*d), rng);
    dist.b = BitVec(dist.H.rows());
    sink(gap_experiment(code, dist, c.eta, c.gap_trials, RngStream(derive_seed(c.seed, kTagInstance, t), 0), *d,
                        c.exec));
  }
}

std::uint64_t advice_bytes(std::uint64_t N, std::size_t m) { return N * ((m + 1 + 7) / 8); }

std::string bench_csv_header() {
  return "mode,n,m,eta,beta,ell,N_theory,N_used,advice_bytes,preprocess_s,online_s,trials_per_accept,"
         "formula_advice,seed";
}

std::string to_csv(const BenchRecord& r) {
  std::ostringstream os;
  os << (r.mode == DecoderMode::Decision ? "decide" : "search") << ',' << r.n << ',' << r.m << ','
     << format_double(r.eta) << ',' << format_double(r.beta) << ',' << r.ell << ',' << r.N_theory << ',' << r.N_used
     << ',' << r.advice_bytes << ',' << format_double(r.preprocess_s) << ',' << format_double(r.online_s) << ','
     << format_double(r.trials_per_accept) << ',' << format_double(r.formula_advice) << ',' << r.seed;
  return os.str();
}

BenchRecord bench(const ExperimentConfig& config, std::uint64_t queries) {
  ExperimentConfig c = config;
  c.timing = true;
  validate(c);
  if (c.mode != ExperimentMode::Decide && c.mode != ExperimentMode::Search)
    throw std::invalid_argument("bench supports decide and search");
  GroupContext ctx = prepare_group(c, 0);
  if (!ctx.error.empty()) throw std::runtime_error(ctx.error);

  BenchRecord b;
  b.mode = ctx.params.mode;
  b.n = c.n;
  b.m = c.m;
  b.eta = c.eta;
  b.beta = ctx.params.beta;
  b.ell = ctx.params.ell;
  b.N_theory = ctx.params.N_theory;
  b.N_used = ctx.params.N_used;
  b.advice_bytes = advice_bytes(b.N_used, c.m);
  b.preprocess_s = ctx.preprocess_s.value_or(0.0);
  b.seed = c.seed;
  const SamplerStats& st = ctx.advice->stats;
  b.trials_per_accept = st.accepted ? static_cast<double>(st.trials) / static_cast<double>(st.accepted) : 0.0;

  double total = 0.0;
  for (std::uint64_t q = 0; q < queries; ++q) total += run_instance(c, ctx, q).online_s.value_or(0.0);
  b.online_s = queries ? total / static_cast<double>(queries) : 0.0;

  const double m = static_cast<double>(c.m), n = static_cast<double>(c.n);
  if (b.mode == DecoderMode::Decision) {
    b.formula_advice = m * m * std::exp(c.eta * n / std::log2(1.0 / b.beta));
  } else {
    const double la = std::log2(1.0 / ctx.params.alpha);
    b.formula_advice = std::pow(m, 4) * la * la / (n * n) * std::exp(c.eta * n / la);
  }
  return b;
}

}  // namespace ncp

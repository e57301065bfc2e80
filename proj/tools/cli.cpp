#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "ncp/baselines.hpp"
#include "ncp/codes.hpp"
#include "ncp/decoder.hpp"
#include "ncp/dist.hpp"
#include "ncp/distinguisher.hpp"
#include "ncp/exec.hpp"
#include "ncp/experiment.hpp"

namespace ncp::cli {

namespace {

struct Globals {
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out;
};

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot write " + path);
      os_ = file_.get();
    }
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

BitVec read_word(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) return BitVec::parse(line);
  }
  throw std::invalid_argument("word file " + path + " is empty");
}

BalanceAudit audit_of(const CodeFile& f, std::uint64_t seed) {
  if (f.audit) return *f.audit;
  if (f.code.n() <= kEnumerationCap) return audit_balance(f.code);
  RngStream rng(seed, 0);
  return estimate_balance(f.code, 4096, rng);
}

double default_beta(const CodeFile& f, std::uint64_t seed) {
  return std::max(audit_of(f, seed).beta_star, 1.0 / static_cast<double>(f.code.m()));
}

AdviceSampler parse_sampler(const std::string& s) {
  if (s == "rejection") return AdviceSampler::Rejection;
  if (s == "exact") return AdviceSampler::Exact;
  throw std::invalid_argument("unknown sampler '" + s + "' (rejection|exact)");
}

void print_params(std::ostream& os, const DecoderParams& p) {
  os << "mode=" << (p.mode == DecoderMode::Decision ? "decide" : "search") << " n=" << p.n << " m=" << p.m
     << " beta=" << format_double(p.beta) << " eta=" << format_double(p.eta) << " alpha=" << format_double(p.alpha)
     << " ell=" << p.ell << " t=" << format_double(p.t) << " delta=" << format_double(p.delta)
     << " N_theory=" << p.N_theory << " N_used=" << p.N_used << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nearest-codeword decoding with preprocessing", "ncp"};
  app.require_subcommand(1);
  Globals g;
  if (const char* env = std::getenv("NCP_SEED")) {
    try {
      g.seed = std::stoull(env);
    } catch (const std::exception&) {
      err << "error: NCP_SEED is not an unsigned integer\n";
      return kExitError;
    }
  }
  app.option_defaults()->always_capture_default();
  app.add_option("--seed", g.seed, "master seed (falls back to NCP_SEED)");
  app.add_option("--threads", g.threads, "OpenMP threads, 0 = runtime default")
      ->check(CLI::NonNegativeNumber)
      ->each([](const std::string& v) {
        if (const int t = std::stoi(v); t > 0) set_thread_count(t);
      });
  app.add_option("--out", g.out, "output file (default stdout)");
  app.fallthrough();

  int code_result = 0;

  // gen-code
  auto* gen = app.add_subcommand("gen-code", "draw a random full-rank code and audit it");
  std::size_t gm = 64, gn = 4, g_attempts = 1000;
  std::optional<double> g_max_beta;
  gen->add_option("--m", gm, "blocklength")->required();
  gen->add_option("--n", gn, "message length")->required();
  gen->add_option("--max-beta", g_max_beta, "resample until the audited beta_star is below this");
  gen->add_option("--max-attempts", g_attempts, "resampling budget");
  gen->callback([&] {
    RngStream rng(g.seed, 0);
    for (std::size_t a = 0; a < g_attempts; ++a) {
      LinearCode c = random_code(gm, gn, rng);
      const BalanceAudit audit =
          gn <= kEnumerationCap ? audit_balance(c) : estimate_balance(c, 4096, rng);
      if (g_max_beta && !(audit.beta_star < *g_max_beta)) continue;
      Output o(g.out, out);
      write_code(*o, c);
      write_audit_comment(*o, audit);
      return;
    }
    throw std::runtime_error("no code below --max-beta in " + std::to_string(g_attempts) + " draws");
  });

  // audit
  auto* aud = app.add_subcommand("audit", "balance audit and dual distance of a code");
  std::string code_path;
  std::optional<std::uint64_t> samples;
  std::size_t dual_cap = 8;
  aud->add_option("--code", code_path)->required();
  aud->add_option("--samples", samples, "estimate beta_star from this many sampled codewords");
  aud->add_option("--dual-cap", dual_cap, "largest weight searched for the dual distance");
  aud->callback([&] {
    const CodeFile f = load_code(code_path);
    BalanceAudit a;
    if (samples) {
      RngStream rng(g.seed, 0);
      a = estimate_balance(f.code, *samples, rng);
    } else {
      a = audit_balance(f.code);
    }
    const auto d = dual_distance(f.code, dual_cap);
    Output o(g.out, out);
    *o << "m=" << f.code.m() << " n=" << f.code.n() << " hash=" << f.code.hash()
       << " beta_star=" << format_double(a.beta_star) << " witness=" << a.witness.to_string()
       << " audit=" << (a.estimated ? "estimated" : "exact")
       << " dual_distance=" << (d ? std::to_string(*d) : "gt" + std::to_string(dual_cap)) << '\n';
  });

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "sample advice rows from D_C");
  std::string p_mode = "decide", p_sampler = "rejection";
  double eta = 0.01;
  std::optional<double> beta;
  std::optional<std::uint64_t> rows;
  double calibration = 32.0;
  pre->add_option("--code", code_path)->required();
  pre->add_option("--mode", p_mode, "decide|search")->check(CLI::IsMember({"decide", "search"}));
  pre->add_option("--eta", eta)->required();
  pre->add_option("--beta", beta, "separation parameter (default max(beta_star, 1/m))");
  pre->add_option("--rows", rows, "advice rows (default N_theory for decide, calibrated for search)");
  pre->add_option("--calibration", calibration, "c in min(N_theory, c(m/l)^2 ln m)");
  pre->add_option("--sampler", p_sampler)->check(CLI::IsMember({"rejection", "exact"}));
  pre->callback([&] {
    const CodeFile f = load_code(code_path);
    const double b = beta.value_or(default_beta(f, g.seed));
    DecoderParams p = p_mode == "decide" ? decision_params(f.code.n(), f.code.m(), b, eta)
                                         : search_params(f.code.n(), f.code.m(), b, eta);
    if (rows) {
      p = with_rows(p, *rows);
    } else if (p.mode == DecoderMode::Search) {
      p = with_rows(p, calibrated_rows(p, calibration));
    }
    AdviceOptions opts;
    opts.sampler = parse_sampler(p_sampler);
    Advice a = make_advice(f.code, p.dist(), p.N_used, g.seed, opts);
    a.beta = b;
    a.eta = eta;
    print_params(err, p);
    if (a.stats.accepted)
      err << "trials=" << a.stats.trials << " accepted=" << a.stats.accepted << " trials_per_accept="
          << format_double(static_cast<double>(a.stats.trials) / static_cast<double>(a.stats.accepted)) << '\n';
    Output o(g.out, out);
    write_advice(*o, a);
  });

  // decide
  auto* dec = app.add_subcommand("decide", "threshold decision against stored advice");
  std::string advice_path, word_path;
  std::optional<double> d_eta;
  dec->add_option("--code", code_path)->required();
  dec->add_option("--advice", advice_path)->required();
  dec->add_option("--word", word_path)->required();
  dec->add_option("--eta", d_eta, "default: the value stored in the advice header");
  dec->add_option("--beta", beta, "default: the advice header, then the code audit");
  dec->callback([&] {
    const CodeFile f = load_code(code_path);
    const Advice a = load_advice(advice_path);
    if (a.code_hash != f.code.hash()) throw std::invalid_argument("advice was built for a different code");
    const double e = d_eta ? *d_eta : a.eta ? *a.eta : throw std::invalid_argument("--eta is required");
    const double b = beta ? *beta : a.beta ? *a.beta : default_beta(f, g.seed);
    const DecoderParams p = with_rows(decision_params(f.code.n(), f.code.m(), b, e), a.size());
    const BitVec w = read_word(word_path);
    const std::int64_t s = advice_statistic(w, a);
    const Decision d = decide(w, a, p);
    Output o(g.out, out);
    *o << to_string(d) << " statistic=" << s << " threshold=" << threshold_floor(p.t, a.size()) << " N=" << a.size()
       << '\n';
    code_result = d == Decision::Yes ? 0 : 1;
  });

  // search
  auto* sea = app.add_subcommand("search", "bit-flip error search against stored advice");
  sea->add_option("--code", code_path)->required();
  sea->add_option("--advice", advice_path)->required();
  sea->add_option("--word", word_path)->required();
  sea->callback([&] {
    const CodeFile f = load_code(code_path);
    const Advice a = load_advice(advice_path);
    if (a.code_hash != f.code.hash()) throw std::invalid_argument("advice was built for a different code");
    const BitVec w = read_word(word_path);
    const SearchOutcome r = search(w, a, f.code);
    Output o(g.out, out);
    if (!r.message) {
      *o << "DecodeFailure error_estimate=" << r.error_estimate.to_string() << '\n';
      code_result = 2;
      return;
    }
    *o << r.message->to_string() << " error_weight=" << weight(r.error_estimate) << '\n';
  });

  // reduce
  auto* red = app.add_subcommand("reduce", "search through n decision queries on the subcodes");
  std::string oracle_kind = "advice";
  red->add_option("--code", code_path)->required();
  red->add_option("--eta", eta)->required();
  red->add_option("--beta", beta, "separation of the full code (default max(beta_star, 1/m))");
  red->add_option("--word", word_path, "decode this word; without it only the subcode advice is built");
  red->add_option("--rows", rows, "advice rows per subcode (default N_theory)");
  red->add_option("--oracle", oracle_kind)->check(CLI::IsMember({"advice", "exact"}));
  red->callback([&] {
    const CodeFile f = load_code(code_path);
    const double b = beta.value_or(default_beta(f, g.seed));
    AdviceDecisionOracle advice_oracle({g.seed, rows, AdviceOptions{}});
    if (oracle_kind == "advice") {
      for (std::size_t i = 0; i < f.code.n(); ++i) {
        const LinearCode sub = f.code.drop_column(i);
        const auto& [p, a] = advice_oracle.prepare(sub, b + 2.0 * eta, eta);
        err << "subcode " << i << ' ';
        print_params(err, p);
        if (!g.out.empty()) {
          Advice copy = a;
          copy.beta = p.beta;
          copy.eta = eta;
          save_advice(g.out + "." + std::to_string(i), copy);
        }
      }
    }
    if (word_path.empty()) return;
    const BitVec w = read_word(word_path);
    const DecisionOracle oracle =
        oracle_kind == "exact" ? exact_decision_oracle()
                               : DecisionOracle([&](const LinearCode& s, BitRef v, double bb, double ee) {
                                   return advice_oracle(s, v, bb, ee);
                                 });
    const ReductionOutcome r = search_via_decision(w, f.code, oracle, b, eta);
    out << r.message.to_string() << " oracle_calls=" << r.oracle_calls << '\n';
  });

  // oracle
  auto* orc = app.add_subcommand("oracle", "exhaustive nearest codeword");
  orc->add_option("--code", code_path)->required();
  orc->add_option("--word", word_path)->required();
  orc->callback([&] {
    const CodeFile f = load_code(code_path);
    const OracleResult r = exhaustive_nearest(f.code, read_word(word_path));
    Output o(g.out, out);
    *o << r.x_star.to_string() << " distance=" << r.distance << " unique=" << (r.unique ? "true" : "false") << '\n';
  });

  // prange
  auto* pra = app.add_subcommand("prange", "Prange information-set decoding");
  std::size_t target = 0;
  std::uint64_t max_iters = 100000;
  pra->add_option("--code", code_path)->required();
  pra->add_option("--word", word_path)->required();
  pra->add_option("--dist", target, "accept codewords within this distance")->required();
  pra->add_option("--max-iters", max_iters);
  pra->callback([&] {
    const CodeFile f = load_code(code_path);
    const PrangeResult r = prange_decode(f.code, read_word(word_path), target, RngStream(g.seed, 0), max_iters);
    Output o(g.out, out);
    if (!r.message) {
      *o << "NotFound iterations=" << r.iterations << '\n';
      code_result = 2;
      return;
    }
    *o << r.message->to_string() << " iterations=" << r.iterations << " singular=" << r.singular << '\n';
  });

  // lower-bound
  auto* low = app.add_subcommand("lower-bound", "bias of parity tests on noisy codewords vs uniform words");
  std::uint64_t trials = 10000;
  std::optional<std::size_t> dual_rows, row_weight;
  low->add_option("--code", code_path)->required();
  low->add_option("--eta", eta)->required();
  low->add_option("--trials", trials);
  auto* adv_opt = low->add_option("--advice", advice_path, "use these rows as the distinguisher");
  auto* rnd_opt = low->add_option("--random-dual-rows", dual_rows, "draw this many dual codewords");
  low->add_option("--row-weight", row_weight, "weight of the drawn dual codewords (default: dual distance)");
  low->add_option("--dual-cap", dual_cap);
  adv_opt->excludes(rnd_opt);
  low->callback([&] {
    const CodeFile f = load_code(code_path);
    const auto d = dual_distance(f.code, dual_cap);
    if (!d) throw std::runtime_error("dual distance above --dual-cap");
    ThresholdDistinguisher dist;
    RngStream rng(g.seed, 1);
    if (!advice_path.empty()) {
      const Advice a = load_advice(advice_path);
      dist.H = a.rows;
      dist.b = a.shifts;
    } else {
      dist.H = random_dual_rows(f.code, dual_rows.value_or(16), row_weight.value_or(*d), rng);
      dist.b = BitVec(dist.H.rows());
    }
    const GapReport r = gap_experiment(f.code, dist, eta, trials, RngStream(g.seed, 2), *d);
    Output o(g.out, out);
    *o << gap_csv_header() << '\n' << to_csv(r, g.seed) << '\n';
  });

  // bench and experiment share the config flags
  ExperimentConfig cfg;
  std::string e_mode = "decide", e_sampler = "rejection";
  std::uint64_t queries = 10;
  bool no_timing = false;
  std::optional<std::uint64_t> replay;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--mode", e_mode);
    sub->add_option("--n", cfg.n);
    sub->add_option("--m", cfg.m);
    sub->add_option("--eta", cfg.eta);
    sub->add_option("--beta", cfg.beta, "default: max(beta_star, 1/m) per code");
    sub->add_option("--advice-rows", cfg.rows, "advice size override");
    sub->add_option("--calibration", cfg.calibration);
    sub->add_option("--sampler", e_sampler)->check(CLI::IsMember({"rejection", "exact"}));
  };
  auto* ben = app.add_subcommand("bench", "preprocessing and online cost for one code");
  add_config(ben);
  ben->add_option("--queries", queries);
  ben->callback([&] {
    cfg.mode = parse_mode(e_mode);
    cfg.seed = g.seed;
    cfg.sampler = parse_sampler(e_sampler);
    const BenchRecord r = bench(cfg, queries);
    Output o(g.out, out);
    *o << bench_csv_header() << '\n' << to_csv(r) << '\n';
  });

  auto* exp = app.add_subcommand("experiment", "end-to-end trials written as CSV");
  add_config(exp);
  exp->add_option("--trials", cfg.trials);
  exp->add_option("--instances-per-code", cfg.instances_per_code);
  exp->add_option("--oracle", oracle_kind, "reduce mode: advice|exact")->check(CLI::IsMember({"advice", "exact"}));
  exp->add_option("--gap-trials", cfg.gap_trials);
  exp->add_option("--row-weight", cfg.row_weight);
  exp->add_option("--dual-cap", cfg.dual_distance_cap);
  exp->add_option("--cache", cfg.advice_cache, "advice cache directory");
  exp->add_flag("--no-timing", no_timing, "write timing columns as na");
  exp->add_option("--replay", replay, "rerun a single trial index");
  exp->callback([&] {
    cfg.mode = parse_mode(e_mode);
    cfg.seed = g.seed;
    cfg.sampler = parse_sampler(e_sampler);
    cfg.reduce_oracle = oracle_kind == "exact" ? ReduceOracle::Exact : ReduceOracle::Advice;
    cfg.timing = !no_timing;
    Output o(g.out, out);
    if (replay) {
      *o << csv_header() << '\n' << to_csv(run_trial(cfg, *replay)) << '\n';
      return;
    }
    write_experiment_csv(*o, cfg);
  });

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return code_result;
}

}  // namespace ncp::cli

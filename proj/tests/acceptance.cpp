// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ncp/baselines.hpp"
#include "ncp/codes.hpp"
#include "ncp/decoder.hpp"
#include "ncp/dist.hpp"
#include "ncp/distinguisher.hpp"
#include "ncp/experiment.hpp"

using namespace ncp;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

BitVec random_word(std::size_t m, RngStream& rng) {
  BitVec v(m);
  for (std::size_t i = 0; i < m; ++i) v.set(i, rng.next_bits(1));
  return v;
}

BitVec random_error(std::size_t m, std::size_t wt, RngStream& rng) {
  BitVec e(m);
  while (weight(e) < wt) e.set(rng.next_index(m));
  return e;
}

LinearCode code_below(std::size_t m, std::size_t n, double bound, RngStream& rng) {
  for (;;) {
    LinearCode c = random_code(m, n, rng);
    if (audit_balance(c).beta_star < bound) return c;
  }
}

LinearCode perfectly_balanced(std::size_t m, std::size_t n, RngStream& rng) { return code_below(m, n, 1e-12, rng); }

// 1. Empirical Fourier coefficient of D.
Verdict fourier_identity() {
  const auto t0 = Clock::now();
  RngStream rng(1001, 0);
  double worst = 0.0;
  for (std::size_t m : {8, 16, 32}) {
    for (unsigned ell : {2U, 4U, 8U}) {
      const DistParams p = DistParams::make(m, ell);
      BitVec w = random_word(m, rng);
      if (weight(w) == 0) w.set(0);
      const int draws = 100000;
      double sum = 0.0;
      for (int i = 0; i < draws; ++i) sum += dot(sample_D(p, rng), w) ? -1.0 : 1.0;
      const double f = std::pow(1.0 - 2.0 * static_cast<double>(weight(w)) / static_cast<double>(m), ell);
      const double sd = std::sqrt(std::max(1e-300, 1.0 - f * f) / draws);
      worst = std::max(worst, std::abs(sum / draws - f) / sd);
    }
  }
  const double secs = since(t0);
  return {worst < 5.0 && secs < 10.0, "max |z| = " + fmt("%.2f", worst) + ", " + fmt("%.1f s", secs)};
}

// 2. exact_pmf_D against m^ell tuple enumeration, and normalization.
Verdict exact_pmf() {
  double worst = 0.0;
  for (std::size_t m = 1; m <= 4; ++m) {
    for (unsigned ell = 0; ell <= 6; ell += 2) {
      std::map<std::uint64_t, double> pmf;
      std::uint64_t count = 1;
      for (unsigned j = 0; j < ell; ++j) count *= m;
      for (std::uint64_t t = 0; t < count; ++t) {
        std::uint64_t v = 0, rest = t;
        for (unsigned j = 0; j < ell; ++j, rest /= m) v ^= std::uint64_t{1} << (rest % m);
        pmf[v] += 1.0 / static_cast<double>(count);
      }
      for (std::uint64_t v = 0; v < (std::uint64_t{1} << m); ++v) {
        const double want = pmf.count(v) ? pmf[v] : 0.0;
        const double got = exact_pmf_D(DistParams::make(m, ell), static_cast<std::size_t>(std::popcount(v)));
        worst = std::max(worst, std::abs(got - want));
      }
    }
  }
  double mass_err = 0.0;
  for (std::size_t m = 1; m <= 32; ++m) {
    for (unsigned ell : {0U, 2U, 4U, 6U, 8U, 12U}) {
      long double total = 0.0L, binom = 1.0L;
      for (std::size_t t = 0; t <= m; ++t) {
        total += binom * exact_pmf_D(DistParams::make(m, ell), t);
        binom = binom * static_cast<long double>(m - t) / static_cast<long double>(t + 1);
      }
      mass_err = std::max(mass_err, static_cast<double>(std::fabs(total - 1.0L)));
    }
  }
  return {worst <= 1e-10 && mass_err <= 1e-10,
          "max pmf error " + fmt("%.2e", worst) + ", max |mass - 1| " + fmt("%.2e", mass_err)};
}

// 3. Rejection sampler against the enumerated D_C table.
Verdict conditional_sampler() {
  RngStream crng(1003, 0);
  const LinearCode c = random_code(8, 2, crng);
  const DistParams p = DistParams::make(8, 4);
  const ExactDCTable table(c, p);
  std::map<std::string, double> counts;
  SamplerStats st;
  RngStream rng(1003, 1);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) counts[sample_DC_rejection(c, p, rng, 0, &st).to_string()] += 1.0;
  double chi2 = 0.0;
  bool outside = false;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double e = draws * table.probability(i);
    const double g = counts[table.word(i).to_string()];
    chi2 += (g - e) * (g - e) / e;
    counts.erase(table.word(i).to_string());
  }
  outside = !counts.empty();
  const boost::math::chi_squared dist(static_cast<double>(table.size() - 1));
  const double pval = boost::math::cdf(boost::math::complement(dist, chi2));
  const double z = dual_mass(c, p);
  const double T = static_cast<double>(st.trials);
  const double zscore = std::abs(static_cast<double>(st.accepted) - T * z) / std::sqrt(T * z * (1 - z));
  return {pval > 0.001 && zscore < 5.0 && !outside,
          "chi2 p = " + fmt("%.3f", pval) + ", acceptance z = " + fmt("%.2f", zscore)};
}

// 4. Exact D̂_C against the two decision bounds.
Verdict decision_bounds() {
  const auto t0 = Clock::now();
  const double eta = 1.0 / 16;
  std::size_t close = 0, separated = 0, violations = 0;
  double min_close = 1.0, max_sep = 0.0;
  auto check = [&](const LinearCode& c, const DecoderParams& p, BitRef w, Closeness cls) {
    if (cls == Closeness::Neither) return;
    const double f = fourier_DC_exact(c, p.dist(), w, Exec::Serial);
    if (cls == Closeness::Close) {
      ++close;
      min_close = std::min(min_close, f / close_bound(p));
      violations += !(f > close_bound(p));
    } else {
      ++separated;
      max_sep = std::max(max_sep, f / separated_bound(p));
      violations += !(f < separated_bound(p));
    }
  };

  RngStream rng(1004, 0);
  for (int k = 0; k < 20; ++k) {
    const LinearCode c = code_below(16, 4, 1.0 / 6, rng);
    const double beta = std::max(audit_balance(c).beta_star, 1.0 / 16);
    const DecoderParams p = decision_params(4, 16, beta, eta);
    for (std::uint64_t x = 0; x < (1U << 16); ++x) {
      const BitVec w = BitVec::from_uint(16, x);
      check(c, p, w, closeness_class(c, w, eta, beta, kEnumerationCap, Exec::Serial));
    }
  }
  for (int k = 0; k < 20; ++k) {
    const LinearCode c = code_below(64, 4, 1.0 / 6, rng);
    const double beta = std::max(audit_balance(c).beta_star, 1.0 / 64);
    const DecoderParams p = decision_params(4, 64, beta, eta);
    for (int s = 0; s < 10000; ++s) {
      BitVec w;
      if (s % 2 == 0) {
        w = c.encode_bits(rng.next_bits(4)) ^ random_error(64, rng.next_index(5), rng);
      } else {
        w = random_word(64, rng);
      }
      check(c, p, w, closeness_class(c, w, eta, beta, kEnumerationCap, Exec::Serial));
    }
  }
  const double secs = since(t0);
  return {violations == 0 && close > 0 && separated > 0 && secs < 120.0,
          std::to_string(close) + " close / " + std::to_string(separated) + " separated words, " +
              std::to_string(violations) + " violations, min close ratio " + fmt("%.4f", min_close) +
              ", max separated ratio " + fmt("%.2e", max_sep) + ", " + fmt("%.1f s", secs)};
}

struct RunSummary {
  std::size_t total = 0, good = 0, mismatched = 0, errors = 0;
};

RunSummary summarize(const ExperimentConfig& c) {
  RunSummary s;
  run_experiment(c, [&](const ResultRecord& r) {
    ++s.total;
    s.good += r.success() && r.oracle_match.value_or(false);
    s.errors += r.status == "error";
    if (c.mode != ExperimentMode::Decide && (r.status == "ok" || r.status == "fail"))
      s.mismatched += !r.oracle_match.value_or(false);
  });
  return s;
}

// 5. Decision end to end with N = N_theory.
Verdict decision_end_to_end() {
  const auto t0 = Clock::now();
  ExperimentConfig c;
  c.mode = ExperimentMode::Decide;
  c.n = 8;
  c.m = 4096;
  c.eta = 0.01;
  c.trials = 100;
  c.instances_per_code = 10;
  c.seed = 1005;
  const RunSummary s = summarize(c);
  const double secs = since(t0);
  const double rate = static_cast<double>(s.good) / static_cast<double>(s.total);
  return {s.total == 100 && rate >= 0.95 && secs < 300.0,
          std::to_string(s.good) + "/" + std::to_string(s.total) + " correct (50 YES, 50 NO, 10 codes), " +
              fmt("%.1f s", secs)};
}

// 6. Search end to end with calibrated advice.
Verdict search_end_to_end() {
  const auto t0 = Clock::now();
  ExperimentConfig c;
  c.mode = ExperimentMode::Search;
  c.n = 4;
  c.m = 512;
  c.eta = 4.0 / 512;
  c.trials = 50;
  c.instances_per_code = 5;
  c.seed = 1006;
  const RunSummary s = summarize(c);
  const double secs = since(t0);
  const double rate = static_cast<double>(s.good) / static_cast<double>(s.total);
  return {s.total == 50 && rate >= 0.9 && s.mismatched == 0 && secs < 300.0,
          std::to_string(s.good) + "/" + std::to_string(s.total) + " recovered, " + std::to_string(s.mismatched) +
              " outputs disagreeing with the exhaustive oracle, " + fmt("%.1f s", secs)};
}

// 7. Sign and size of the exact flip difference.
Verdict monotonicity() {
  RngStream rng(1007, 0);
  const DecoderParams p = search_params(3, 16, 1.0 / 16, 1.0 / 16);
  std::size_t checked = 0, bad = 0;
  double min_margin = 1e9;
  for (int k = 0; k < 10; ++k) {
    const LinearCode c = perfectly_balanced(16, 3, rng);
    for (std::size_t j = 0; j <= 16; ++j) {
      const BitVec e = j == 16 ? BitVec(16) : BitVec::unit(16, j);
      const double base = fourier_DC_exact(c, p.dist(), e, Exec::Serial);
      for (std::size_t i = 0; i < 16; ++i) {
        BitVec ei = e;
        ei.flip(i);
        const double d = base - fourier_DC_exact(c, p.dist(), ei, Exec::Serial);
        const double signed_d = e[i] ? -d : d;
        ++checked;
        bad += !(signed_d > p.delta);
        min_margin = std::min(min_margin, signed_d / p.delta);
      }
    }
  }
  return {bad == 0, std::to_string(checked) + " (code, e, i) cases, " + std::to_string(bad) +
                        " failures, min |delta_i| / bound = " + fmt("%.2f", min_margin)};
}

// 8. Search through the exact decision oracle.
Verdict search_to_decision() {
  RngStream rng(1008, 0);
  const double beta = 1.0 / 32, eta = 1.0 / 16;
  const DecisionOracle oracle = exact_decision_oracle(Exec::Serial);
  std::size_t cases = 0, wrong = 0;
  for (int k = 0; k < 10; ++k) {
    const LinearCode c = perfectly_balanced(16, 3, rng);
    for (std::uint64_t xv = 0; xv < 8; ++xv) {
      const BitVec x = BitVec::from_uint(3, xv);
      for (std::size_t j = 0; j <= 16; ++j) {
        BitVec w = c.encode(x);
        if (j < 16) w.flip(j);
        const ReductionOutcome r = search_via_decision(w, c, oracle, beta, eta);
        ++cases;
        wrong += !(r.message == x && r.oracle_calls == 3);
      }
    }
  }
  return {wrong == 0, std::to_string(cases) + " inputs over 10 codes, " + std::to_string(wrong) + " wrong"};
}

// 9. Interval compiler, exhaustive over m = 6.
Verdict compiler() {
  RngStream rng(1009, 0);
  std::size_t instances = 0, bad = 0;
  for (std::size_t N = 1; N <= 4; ++N) {
    for (std::size_t k = 2; k <= 3; ++k) {
      for (int rep = 0; rep < 25; ++rep) {
        IntervalDistinguisher d{BitMatrix(N, 6), BitVec(N), {}, {}};
        for (std::size_t i = 0; i < N; ++i) {
          d.H.set_row(i, random_word(6, rng));
          d.b.set(i, rng.next_bits(1));
        }
        std::vector<std::int64_t> pool;
        for (auto v = -static_cast<std::int64_t>(N); v <= static_cast<std::int64_t>(N); ++v) pool.push_back(v);
        for (std::size_t i = 0; i + 1 < k; ++i) std::swap(pool[i], pool[i + rng.next_index(pool.size() - i)]);
        d.breakpoints.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k - 1));
        std::sort(d.breakpoints.begin(), d.breakpoints.end());
        const bool first = rng.next_bits(1);
        for (std::size_t j = 0; j < k; ++j) d.accept.push_back(first != (j % 2 == 1));
        const ThresholdDistinguisher t = compile_interval(d);
        ++instances;
        bool ok = t.size() <= compiled_size_bound(N, k);
        for (std::uint64_t wv = 0; wv < 64 && ok; ++wv) {
          const BitVec w = BitVec::from_uint(6, wv);
          const std::int64_t a = eval_statistic(d, w);
          std::int64_t prod = 1;
          for (auto bp : d.breakpoints) prod *= a - bp;
          ok = eval_statistic(t, w) == prod && accepts(t, w) == accepts(d, w);
        }
        bad += !ok;
      }
    }
  }
  return {bad == 0, std::to_string(instances) + " instances x 64 words, " + std::to_string(bad) + " mismatches"};
}

// 10. Bias of dual-codeword tests on noisy codewords.
Verdict gap_inequality() {
  RngStream rng(1010, 0);
  const double eta = 0.05;
  std::size_t bad = 0;
  double worst_pred = 0.0, worst_bound = -1e9;
  std::map<std::size_t, int> by_d;
  for (int k = 0; k < 20; ++k) {
    const LinearCode c = random_code(256, 8, rng);
    const auto d = dual_distance(c, 8);
    if (!d) return {false, "dual distance above the search cap"};
    ++by_d[*d];
    ThresholdDistinguisher t{random_dual_rows(c, 16, *d, rng), BitVec(16), 0, Direction::AcceptAbove};
    const GapReport r = gap_experiment(c, t, eta, 100000, RngStream(1010, 1 + k), *d);
    const double zp = std::abs(r.gap - r.predicted) / r.sigma;
    const double zb = (r.gap - r.bound) / r.sigma;
    worst_pred = std::max(worst_pred, zp);
    worst_bound = std::max(worst_bound, zb);
    bad += !(zp < 5.0 && zb < 5.0);
  }
  std::string ds;
  for (auto [d, n] : by_d) ds += " d=" + std::to_string(d) + ":" + std::to_string(n);
  return {bad == 0, "codes by dual distance" + ds + "; max |gap - predicted| = " + fmt("%.2f", worst_pred) +
                        " sigma, max (gap - bound) = " + fmt("%.1f", worst_bound) + " sigma"};
}

// 11. Failing trials replay alone.
Verdict reproducibility() {
  std::size_t failing = 0, replayed = 0;
  auto probe = [&](ExperimentConfig c) {
    c.timing = false;
    std::vector<std::string> rows;
    std::vector<std::uint64_t> bad;
    run_experiment(c, [&](const ResultRecord& r) {
      rows.push_back(to_csv(r));
      if (r.status != "ok") bad.push_back(r.trial);
    });
    for (std::uint64_t t : bad) {
      ++failing;
      replayed += to_csv(run_trial(c, t)) == rows[t];
    }
  };
  ExperimentConfig dec;
  dec.mode = ExperimentMode::Decide;
  dec.n = 4;
  dec.m = 64;
  dec.eta = 1.0 / 16;
  dec.rows = 8;  // starved advice so that some decisions fail
  dec.trials = 40;
  dec.instances_per_code = 4;
  dec.seed = 1011;
  probe(dec);
  ExperimentConfig sea;
  sea.mode = ExperimentMode::Search;
  sea.n = 4;
  sea.m = 256;
  sea.eta = 2.0 / 256;
  sea.rows = 300;
  sea.trials = 20;
  sea.instances_per_code = 5;
  sea.seed = 1011;
  probe(sea);
  return {failing > 0 && replayed == failing,
          std::to_string(replayed) + "/" + std::to_string(failing) + " failing trials replayed identically"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"fourier identity", fourier_identity},
      {"exact pmf oracle", exact_pmf},
      {"conditional sampler", conditional_sampler},
      {"decision bounds", decision_bounds},
      {"decision end-to-end", decision_end_to_end},
      {"search end-to-end", search_end_to_end},
      {"monotonicity", monotonicity},
      {"search-to-decision", search_to_decision},
      {"distinguisher compiler", compiler},
      {"gap inequality", gap_inequality},
      {"reproducibility", reproducibility},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("%s %zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}

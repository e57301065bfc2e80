#include "ncp/decoder.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

#include "ncp/kernels.hpp"

namespace ncp {

namespace {

std::uint64_t ceil_rows(double v) {
  if (!(v < static_cast<double>(kMaxAdviceRows)))
    throw std::invalid_argument("advice size " + format_double(v) + " exceeds the 2^62-row limit");
  return static_cast<std::uint64_t>(std::ceil(v));
}

unsigned even_ell(std::size_t n, double base) {
  return 2U * static_cast<unsigned>(std::ceil(static_cast<double>(n) / std::log2(1.0 / base)));
}

void fill_decision(DecoderParams& p) {
  p.alpha = p.beta + 2.0 * p.eta;
  const double lg = std::log2(1.0 / p.beta);
  p.ell = even_ell(p.n, p.beta);
  const double e = static_cast<double>(p.n) / lg + 1.0;
  p.t = std::pow(1.0 - 2.0 * p.eta, 2.0 * e) / 3.0;
  p.delta = std::pow(1.0 - 2.0 * p.eta, 2.0 * e) / 6.0;
  p.N_theory = ceil_rows(72.0 * static_cast<double>(p.m) * std::pow(1.0 - 2.0 * p.eta, -4.0 * e));
}

void fill_search(DecoderParams& p) {
  p.alpha = p.beta + 2.0 * p.eta;
  p.ell = even_ell(p.n, p.alpha);
  p.t = 0.0;
  p.delta = static_cast<double>(p.ell) / static_cast<double>(p.m) *
            std::pow(1.0 - 4.0 * p.eta, static_cast<double>(p.ell));
  p.N_theory = ceil_rows(8.0 * static_cast<double>(p.m) / (p.delta * p.delta));
}

}  // namespace

DecoderParams decision_params(std::size_t n, std::size_t m, double beta, double eta) {
  if (n < 1 || m <= n) throw std::invalid_argument("decision_params: need m > n >= 1");
  if (!(beta > 0.0)) throw std::invalid_argument("decision_params: beta must be > 0");
  if (!(beta < 1.0 / 6.0)) throw std::invalid_argument("decision_params: beta must be < 1/6");
  if (!(eta > 0.0)) throw std::invalid_argument("decision_params: eta must be > 0");
  if (!(eta < 1.0 / 6.0)) throw std::invalid_argument("decision_params: eta must be < 1/6");
  DecoderParams p;
  p.mode = DecoderMode::Decision;
  p.n = n;
  p.m = m;
  p.beta = beta;
  p.eta = eta;
  fill_decision(p);
  p.N_used = p.N_theory;
  return p;
}

DecoderParams search_params(std::size_t n, std::size_t m, double beta, double eta) {
  if (n < 1 || m <= n) throw std::invalid_argument("search_params: need m > n >= 1");
  const double floor = 1.0 / static_cast<double>(m);
  if (!(beta >= floor)) throw std::invalid_argument("search_params: beta must be >= 1/m");
  if (!(beta < 1.0 / 8.0)) throw std::invalid_argument("search_params: beta must be < 1/8");
  if (!(eta >= floor)) throw std::invalid_argument("search_params: eta must be >= 1/m");
  if (!(eta < 1.0 / 8.0)) throw std::invalid_argument("search_params: eta must be < 1/8");
  DecoderParams p;
  p.mode = DecoderMode::Search;
  p.n = n;
  p.m = m;
  p.beta = beta;
  p.eta = eta;
  fill_search(p);
  p.N_used = p.N_theory;
  return p;
}

bool DecoderParams::consistent() const {
  DecoderParams q = *this;
  if (mode == DecoderMode::Decision) {
    fill_decision(q);
  } else {
    fill_search(q);
  }
  return q.ell == ell && q.t == t && q.delta == delta && q.N_theory == N_theory && q.alpha == alpha &&
         N_used >= 1 && N_used <= kMaxAdviceRows;
}

std::uint64_t calibrated_rows(const DecoderParams& p, double c) {
  const double r = static_cast<double>(p.m) / static_cast<double>(p.ell);
  const double v = std::ceil(c * r * r * std::log(static_cast<double>(p.m)));
  return std::min<std::uint64_t>(p.N_theory, ceil_rows(v));
}

DecoderParams with_rows(DecoderParams p, std::uint64_t rows) {
  if (rows < 1 || rows > kMaxAdviceRows) throw std::invalid_argument("advice rows must be in [1, 2^62]");
  p.N_used = rows;
  return p;
}

double close_bound(const DecoderParams& p) {
  const double e = static_cast<double>(p.n) / std::log2(1.0 / p.beta) + 1.0;
  return 0.5 * std::pow(1.0 - 2.0 * p.eta, 2.0 * e);
}

double separated_bound(const DecoderParams& p) { return std::ldexp(1.0, -static_cast<int>(p.n)); }

std::int64_t advice_statistic(BitRef w, const Advice& advice, Exec exec) {
  if (w.size() != advice.length()) throw LengthMismatch(w.size(), advice.length());
  return kernels::signed_sum(advice.rows, advice.shifts, w, exec);
}

std::int64_t threshold_floor(double t, std::uint64_t N) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("threshold must be finite and >= 0");
  if (t == 0.0) return 0;
  int e = 0;
  const double f = std::frexp(t, &e);  // t = f · 2^e, f in [0.5, 1)
  const auto mant = static_cast<std::uint64_t>(std::ldexp(f, 53));
  const unsigned __int128 prod = static_cast<unsigned __int128>(mant) * N;
  const int shift = 53 - e;
  unsigned __int128 q = 0;
  if (shift <= 0) {
    q = prod << static_cast<unsigned>(-shift);
  } else if (shift < 128) {
    q = prod >> static_cast<unsigned>(shift);
  }
  const auto cap = static_cast<unsigned __int128>(std::numeric_limits<std::int64_t>::max());
  return static_cast<std::int64_t>(q > cap ? cap : q);
}

const char* to_string(Decision d) { return d == Decision::Yes ? "YES" : "NO"; }

Decision decide(BitRef w, const Advice& advice, const DecoderParams& params, Exec exec) {
  const std::int64_t s = advice_statistic(w, advice, exec);
  return s > threshold_floor(params.t, advice.size()) ? Decision::Yes : Decision::No;
}

SearchOutcome search(BitRef w, const Advice& advice, const LinearCode& code, Exec exec) {
  if (w.size() != advice.length()) throw LengthMismatch(w.size(), advice.length());
  if (code.m() != advice.length()) throw LengthMismatch(code.m(), advice.length());
  const std::size_t m = code.m();
  std::vector<std::int64_t> acc(m);
  SearchOutcome out;
  out.statistic = kernels::coordinate_sums(advice.rows, advice.shifts, w, acc, exec);
  out.error_estimate = BitVec(m);
  out.flipped.resize(m);

  // A coordinate with zero support across all rows keeps the statistic
  // unchanged under flipping; detect it separately from a genuine tie.
  std::vector<bool> touched(m, false);
  for (std::size_t k = 0; k < advice.size(); ++k) {
    auto row = advice.rows.row_words(k);
    for (std::size_t j = 0; j < row.size(); ++j) {
      std::uint64_t x = row[j];
      while (x) {
        touched[j * kWordBits + static_cast<std::size_t>(std::countr_zero(x))] = true;
        x &= x - 1;
      }
    }
  }

  for (std::size_t i = 0; i < m; ++i) {
    out.flipped[i] = out.statistic - 2 * acc[i];
    if (!(out.flipped[i] < out.statistic)) out.error_estimate.set(i);
    if (!touched[i]) out.untouched.push_back(i);
  }
  if (!out.untouched.empty()) {
    std::clog << "ncp: search: " << out.untouched.size()
              << " coordinate(s) lie outside every advice row; they are classified as errors\n";
  }
  out.message = solve(code.generator(), BitRef(w) ^ out.error_estimate);
  return out;
}

ReductionOutcome search_via_decision(BitRef w, const LinearCode& code, const DecisionOracle& oracle, double beta,
                                     double eta) {
  if (w.size() != code.m()) throw LengthMismatch(w.size(), code.m());
  if (code.n() < 2) throw std::invalid_argument("search_via_decision needs n >= 2 (subcodes of dimension n-1)");
  ReductionOutcome out;
  out.message = BitVec(code.n());
  for (std::size_t i = 0; i < code.n(); ++i) {
    const LinearCode sub = code.drop_column(i);
    const Decision d = oracle(sub, w, beta + 2.0 * eta, eta);
    ++out.oracle_calls;
    if (d == Decision::No) out.message.set(i);
  }
  return out;
}

DecisionOracle exact_decision_oracle(Exec exec) {
  return [exec](const LinearCode& sub, BitRef w, double beta, double eta) {
    const DecoderParams p = decision_params(sub.n(), sub.m(), beta, eta);
    return fourier_DC_exact(sub, p.dist(), w, exec) > p.t ? Decision::Yes : Decision::No;
  };
}

const std::pair<DecoderParams, Advice>& AdviceDecisionOracle::prepare(const LinearCode& sub, double beta,
                                                                      double eta) {
  auto it = cache_.find(sub.hash());
  if (it != cache_.end()) return it->second;
  DecoderParams p = decision_params(sub.n(), sub.m(), beta, eta);
  if (opts_.rows) p = with_rows(p, *opts_.rows);
  const std::uint64_t seed = derive_seed(opts_.seed, std::stoull(sub.hash(), nullptr, 16), cache_.size());
  Advice a = make_advice(sub, p.dist(), p.N_used, seed, opts_.advice);
  return cache_.emplace(sub.hash(), std::make_pair(p, std::move(a))).first->second;
}

Decision AdviceDecisionOracle::operator()(const LinearCode& sub, BitRef w, double beta, double eta) {
  const auto& [params, advice] = prepare(sub, beta, eta);
  return decide(w, advice, params, opts_.advice.exec);
}

}  // namespace ncp

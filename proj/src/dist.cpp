#include "ncp/dist.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace ncp {

DistParams DistParams::make(std::size_t m, unsigned ell) {
  if (m == 0) throw std::invalid_argument("blocklength must be positive");
  if (ell % 2 != 0) throw std::invalid_argument("ell must be even, got " + std::to_string(ell));
  return DistParams{m, ell};
}

SamplerExhausted::SamplerExhausted(std::uint64_t trials, std::uint64_t accepted, std::uint64_t row)
    : std::runtime_error("D_C rejection sampler gave up on row " + std::to_string(row) + " after " +
                         std::to_string(trials) + " trials; observed acceptance rate " +
                         format_double(trials ? static_cast<double>(accepted) / static_cast<double>(trials) : 0.0)),
      trials_(trials),
      accepted_(accepted) {}

BitVec sample_D(const DistParams& params, RngStream& rng) {
  BitVec h(params.m);
  for (unsigned j = 0; j < params.ell; ++j) h.flip(rng.next_index(params.m));
  return h;
}

double fourier_D(const DistParams& params, std::size_t w_weight) {
  if (w_weight > params.m) throw std::invalid_argument("weight exceeds blocklength");
  const double base = 1.0 - 2.0 * static_cast<double>(w_weight) / static_cast<double>(params.m);
  return std::pow(base, static_cast<int>(params.ell));
}

namespace {

long double binom(std::size_t n, std::size_t k) {
  if (k > n) return 0.0L;
  k = std::min(k, n - k);
  long double r = 1.0L;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<long double>(n - k + i) / static_cast<long double>(i);
  return std::round(r);
}

long double krawtchouk(std::size_t m, std::size_t k, std::size_t x) {
  long double s = 0.0L;
  for (std::size_t j = 0; j <= std::min(k, x); ++j) {
    const long double t = binom(x, j) * binom(m - x, k - j);
    s += (j % 2 == 0) ? t : -t;
  }
  return s;
}

long double fourier_D_ld(std::size_t m, unsigned ell, std::size_t k) {
  const long double base = 1.0L - 2.0L * static_cast<long double>(k) / static_cast<long double>(m);
  long double r = 1.0L;
  for (unsigned i = 0; i < ell; ++i) r *= base;
  return r;
}

}  // namespace

double exact_pmf_D(const DistParams& params, std::size_t w_weight) {
  const std::size_t m = params.m;
  if (w_weight > m) throw std::invalid_argument("weight exceeds blocklength");
  if (m > kPmfMaxLength)
    throw CapExceeded("exact_pmf_D: Krawtchouk inversion is capped at m = " + std::to_string(kPmfMaxLength));
  // D is supported on even weights up to ell.
  if (w_weight % 2 != params.ell % 2 || w_weight > params.ell) return 0.0;

  long double s = 0.0L;
  for (std::size_t k = 0; k <= m; ++k) s += fourier_D_ld(m, params.ell, k) * krawtchouk(m, k, w_weight);
  const long double p = std::ldexp(s, -static_cast<int>(m));
  return p < 0.0L ? 0.0 : static_cast<double>(p);
}

long double fourier_coset_sum(const LinearCode& code, const DistParams& params, BitRef w, Exec exec) {
  if (code.n() > kEnumerationCap)
    throw CapExceeded("fourier_DC_exact sums over 2^" + std::to_string(code.n()) + " codewords, above cap");
  if (w.size() != code.m()) throw LengthMismatch(w.size(), code.m());
  const CosetScan scan = kernels::scan_coset(code.columns(), w, exec);
  long double s = 0.0L;
  for (std::size_t k = 0; k < scan.histogram.size(); ++k)
    if (scan.histogram[k]) s += static_cast<long double>(scan.histogram[k]) * fourier_D_ld(code.m(), params.ell, k);
  return s;
}

double fourier_DC_exact(const LinearCode& code, const DistParams& params, BitRef w, Exec exec) {
  const BitVec zero(code.m());
  return static_cast<double>(fourier_coset_sum(code, params, w, exec) / fourier_coset_sum(code, params, zero, exec));
}

double dual_mass(const LinearCode& code, const DistParams& params, Exec exec) {
  const BitVec zero(code.m());
  return static_cast<double>(std::ldexp(fourier_coset_sum(code, params, zero, exec), -static_cast<int>(code.n())));
}

std::uint64_t default_max_trials(const LinearCode& code) {
  const std::size_t e = std::min<std::size_t>(code.n() + 7, 62);
  return std::uint64_t{1} << e;
}

BitVec sample_DC_rejection(const LinearCode& code, const DistParams& params, RngStream& rng,
                           std::uint64_t max_trials, SamplerStats* stats) {
  if (params.ell % 2 != 0) throw std::invalid_argument("ell must be even");
  if (params.m != code.m()) throw LengthMismatch(params.m, code.m());
  if (max_trials == 0) max_trials = default_max_trials(code);
  BitVec h(code.m());
  const auto used = sample_dc_row(code.column_syndromes(), params.ell, rng, max_trials, h.words());
  if (!used) {
    if (stats) stats->trials += max_trials;
    throw SamplerExhausted(max_trials, 0, 0);
  }
  if (stats) {
    stats->trials += *used;
    stats->accepted += 1;
  }
  return h;
}

ExactDCTable::ExactDCTable(const LinearCode& code, const DistParams& params) {
  const BitMatrix& basis = code.dual_basis();
  const std::size_t dim = basis.rows();
  if (dim > kExactTableMaxDualDim)
    throw CapExceeded("exact D_C table enumerates 2^" + std::to_string(dim) + " dual codewords, above cap 2^" +
                      std::to_string(kExactTableMaxDualDim));
  if (params.m != code.m()) throw LengthMismatch(params.m, code.m());

  std::vector<double> pmf(params.ell + 1);
  for (std::size_t k = 0; k <= params.ell && k <= params.m; ++k) pmf[k] = exact_pmf_D(params, k);

  BitVec h(code.m());
  const std::uint64_t total = std::uint64_t{1} << dim;
  double z = 0.0;
  for (std::uint64_t g = 0; g < total; ++g) {
    if (g > 0) h ^= basis.row(static_cast<std::size_t>(std::countr_zero(g)));
    const std::size_t wt = weight(h);
    if (wt <= params.ell && pmf[wt] > 0.0) {
      words_.push_back(h);
      probs_.push_back(pmf[wt]);
      z += pmf[wt];
    }
  }
  cumulative_.reserve(probs_.size());
  double run = 0.0;
  for (auto& p : probs_) {
    p /= z;
    run += p;
    cumulative_.push_back(run);
  }
  total_ = run;
}

double ExactDCTable::probability_of(BitRef h) const {
  for (std::size_t i = 0; i < words_.size(); ++i)
    if (BitRef(words_[i]) == h) return probs_[i];
  return 0.0;
}

BitVec ExactDCTable::sample(RngStream& rng) const {
  const double u = rng.next_unit() * total_;
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return words_[static_cast<std::size_t>(it - cumulative_.begin())];
}

BitVec sample_DC_exact(const LinearCode& code, const DistParams& params, RngStream& rng) {
  return ExactDCTable(code, params).sample(rng);
}

Advice make_advice(const LinearCode& code, const DistParams& params, std::size_t N, std::uint64_t seed,
                   const AdviceOptions& options) {
  if (N < 1) throw std::invalid_argument("advice needs at least one row");
  if (params.m != code.m()) throw LengthMismatch(params.m, code.m());
  if (params.ell % 2 != 0) throw std::invalid_argument("ell must be even");

  Advice a;
  a.rows = BitMatrix(N, code.m());
  a.shifts = BitVec(N);
  a.ell = params.ell;
  a.seed = seed;
  a.code_hash = code.hash();

  if (options.sampler == AdviceSampler::Rejection) {
    const std::uint64_t max_trials = options.max_trials ? options.max_trials : default_max_trials(code);
    a.stats = kernels::fill_rejection_rows(code.column_syndromes(), params.ell, seed, max_trials, a.rows, options.exec);
  } else {
    const ExactDCTable table(code, params);
    const auto count = static_cast<std::int64_t>(N);
    auto fill = [&](std::int64_t i) {
      RngStream rng(seed, static_cast<std::uint64_t>(i));
      a.rows.set_row(static_cast<std::size_t>(i), table.sample(rng));
    };
    if (options.exec == Exec::Serial) {
      for (std::int64_t i = 0; i < count; ++i) fill(i);
    } else {
#pragma omp parallel for schedule(static)
      for (std::int64_t i = 0; i < count; ++i) fill(i);
    }
    a.stats = SamplerStats{static_cast<std::uint64_t>(N), static_cast<std::uint64_t>(N)};
  }
  return a;
}

void write_advice(std::ostream& out, const Advice& advice) {
  out << "ncp-advice v1 N=" << advice.size() << " m=" << advice.length() << " l=" << advice.ell
      << " seed=" << advice.seed << " code=" << advice.code_hash;
  if (advice.beta) out << " beta=" << format_double(*advice.beta);
  if (advice.eta) out << " eta=" << format_double(*advice.eta);
  out << '\n';
  std::string line(advice.length() + 2, '0');
  line[advice.length()] = ' ';
  for (std::size_t i = 0; i < advice.size(); ++i) {
    const BitRef r = advice.rows.row(i);
    for (std::size_t j = 0; j < advice.length(); ++j) line[j] = r[j] ? '1' : '0';
    line[advice.length() + 1] = advice.shifts[i] ? '1' : '0';
    out << line << '\n';
  }
}

namespace {

template <typename T>
T header_value(const std::string& tok, std::string_view key) {
  if (tok.compare(0, key.size(), key) != 0) throw std::invalid_argument("advice header: expected " + std::string(key));
  T v{};
  const char* b = tok.data() + key.size();
  const char* e = tok.data() + tok.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || p != e) throw std::invalid_argument("advice header: bad value in " + tok);
  return v;
}

}  // namespace

Advice read_advice(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty advice file");
  std::istringstream hs(line);
  std::string magic, version, nt, mt, lt, st, ct;
  hs >> magic >> version >> nt >> mt >> lt >> st >> ct;
  if (magic != "ncp-advice" || version != "v1") throw std::invalid_argument("not an ncp-advice v1 file");
  const auto N = header_value<std::size_t>(nt, "N=");
  const auto m = header_value<std::size_t>(mt, "m=");
  Advice a;
  a.ell = header_value<unsigned>(lt, "l=");
  a.seed = header_value<std::uint64_t>(st, "seed=");
  if (ct.rfind("code=", 0) != 0) throw std::invalid_argument("advice header: expected code=");
  a.code_hash = ct.substr(5);
  for (std::string tok; hs >> tok;) {
    if (tok.rfind("beta=", 0) == 0) {
      a.beta = header_value<double>(tok, "beta=");
    } else if (tok.rfind("eta=", 0) == 0) {
      a.eta = header_value<double>(tok, "eta=");
    }
  }
  a.rows = BitMatrix(N, m);
  a.shifts = BitVec(N);
  for (std::size_t i = 0; i < N; ++i) {
    if (!std::getline(in, line)) throw std::invalid_argument("advice file truncated at row " + std::to_string(i));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.size() != m + 2 || line[m] != ' ')
      throw std::invalid_argument("advice row " + std::to_string(i) + " is malformed");
    for (std::size_t j = 0; j < m; ++j) {
      if (line[j] == '1') {
        a.rows.set(i, j);
      } else if (line[j] != '0') {
        throw std::invalid_argument("advice row " + std::to_string(i) + " has a non-bit character");
      }
    }
    if (line[m + 1] == '1') {
      a.shifts.set(i);
    } else if (line[m + 1] != '0') {
      throw std::invalid_argument("advice row " + std::to_string(i) + " has a bad shift bit");
    }
  }
  a.stats = SamplerStats{N, N};
  return a;
}

Advice load_advice(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_advice(in);
}

void save_advice(const std::string& path, const Advice& advice) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_advice(out, advice);
}

}  // namespace ncp

#include "ncp/codes.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_map>

#include "ncp/kernels.hpp"

namespace ncp {

namespace {

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kHex[h & 0xf];
    h >>= 4;
  }
  return out;
}

std::string canonical_text(const BitMatrix& columns) {
  std::ostringstream os;
  os << "ncp-code v1 m=" << columns.cols() << " n=" << columns.rows() << '\n';
  for (std::size_t j = 0; j < columns.rows(); ++j) os << to_string(columns.row(j)) << '\n';
  return os.str();
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) return std::to_string(v);
  return std::string(buf, end);
}

LinearCode::LinearCode(BitMatrix columns) : columns_(std::move(columns)) {
  const std::size_t n = columns_.rows();
  const std::size_t m = columns_.cols();
  if (n == 0) throw std::invalid_argument("code needs at least one generator column");
  if (n > kMaxMessageBits) throw std::invalid_argument("message length above 64 is not supported");
  if (m <= n) throw std::invalid_argument("blocklength must exceed message length");
  if (rank(columns_) != n) throw std::invalid_argument("generator columns are linearly dependent");

  generator_ = columns_.transpose();
  dual_basis_ = nullspace_basis(columns_);
  syndromes_.resize(m);
  for (std::size_t i = 0; i < m; ++i) syndromes_[i] = generator_.row_words(i)[0];
  hash_ = fnv1a_hex(canonical_text(columns_));
}

LinearCode LinearCode::from_columns(std::span<const BitVec> columns) {
  if (columns.empty()) throw std::invalid_argument("code needs at least one generator column");
  return LinearCode(BitMatrix::from_rows(columns, columns.front().size()));
}

BitVec LinearCode::encode(BitRef x) const {
  if (x.size() != n()) throw LengthMismatch(x.size(), n());
  BitVec v(m());
  for (std::size_t j = 0; j < n(); ++j)
    if (x[j]) v ^= columns_.row(j);
  return v;
}

BitVec LinearCode::encode_bits(std::uint64_t x) const {
  BitVec v(m());
  for (std::size_t j = 0; j < n(); ++j)
    if ((x >> j) & 1U) v ^= columns_.row(j);
  return v;
}

std::uint64_t LinearCode::syndrome(BitRef w) const {
  if (w.size() != m()) throw LengthMismatch(w.size(), m());
  std::uint64_t s = 0;
  auto words = w.words();
  for (std::size_t k = 0; k < words.size(); ++k) {
    std::uint64_t x = words[k];
    while (x) {
      s ^= syndromes_[k * kWordBits + static_cast<std::size_t>(std::countr_zero(x))];
      x &= x - 1;
    }
  }
  return s;
}

LinearCode LinearCode::drop_column(std::size_t i) const {
  if (i >= n()) throw std::out_of_range("drop_column");
  BitMatrix sub(0, m());
  for (std::size_t j = 0; j < n(); ++j)
    if (j != i) sub.append_row(columns_.row(j));
  return LinearCode(std::move(sub));
}

LinearCode random_code(std::size_t m, std::size_t n, RngStream& rng) {
  if (!(m > n && n >= 1)) throw std::invalid_argument("random_code requires m > n >= 1");
  if (n > kMaxMessageBits) throw std::invalid_argument("message length above 64 is not supported");
  for (;;) {
    BitMatrix cols(n, m);
    for (std::size_t j = 0; j < n; ++j) {
      auto w = cols.row_words(j);
      for (auto& x : w) x = rng.next_u64();
      w.back() &= tail_mask(m);
    }
    if (rank(cols) == n) return LinearCode(std::move(cols));
  }
}

bool is_balanced_weight(std::size_t wt, std::size_t m, double beta) {
  const double dev = std::abs(static_cast<double>(m) - 2.0 * static_cast<double>(wt));
  return dev <= beta * static_cast<double>(m);
}

BalanceAudit audit_balance(const LinearCode& code, std::size_t cap, Exec exec) {
  if (code.n() > cap)
    throw CapExceeded("balance audit enumerates 2^" + std::to_string(code.n()) + " codewords, above cap 2^" +
                      std::to_string(cap) + "; use estimate_balance (sampling mode)");
  const BitVec zero(code.m());
  const CosetScan scan = kernels::scan_coset(code.columns(), zero, exec);
  const double m = static_cast<double>(code.m());
  const double lo = std::abs(1.0 - 2.0 * static_cast<double>(scan.nz_min_weight) / m);
  const double hi = std::abs(1.0 - 2.0 * static_cast<double>(scan.nz_max_weight) / m);
  BalanceAudit a;
  std::uint64_t x = 0;
  if (lo > hi || (lo == hi && lex_key(scan.nz_min_x, code.n()) < lex_key(scan.nz_max_x, code.n()))) {
    a.beta_star = lo;
    x = scan.nz_min_x;
  } else {
    a.beta_star = hi;
    x = scan.nz_max_x;
  }
  a.witness = BitVec::from_uint(code.n(), x);
  a.samples = (std::uint64_t{1} << code.n()) - 1;
  return a;
}

BalanceAudit estimate_balance(const LinearCode& code, std::uint64_t samples, RngStream& rng) {
  BalanceAudit a;
  a.estimated = true;
  a.samples = samples;
  a.witness = BitVec(code.n());
  const double m = static_cast<double>(code.m());
  for (std::uint64_t s = 0; s < samples; ++s) {
    std::uint64_t x = 0;
    while (x == 0) x = rng.next_bits(static_cast<unsigned>(code.n()));
    const double b = std::abs(1.0 - 2.0 * static_cast<double>(weight(code.encode_bits(x))) / m);
    if (b > a.beta_star || s == 0) {
      a.beta_star = b;
      a.witness = BitVec::from_uint(code.n(), x);
    }
  }
  return a;
}

namespace {

bool find_dual_support(std::span<const std::uint64_t> syn,
                       const std::unordered_map<std::uint64_t, std::size_t>& last_pos, std::size_t remaining,
                       std::size_t start, std::uint64_t acc) {
  if (remaining == 1) {
    auto it = last_pos.find(acc);
    return it != last_pos.end() && it->second >= start;
  }
  for (std::size_t i = start; i + remaining <= syn.size(); ++i)
    if (find_dual_support(syn, last_pos, remaining - 1, i + 1, acc ^ syn[i])) return true;
  return false;
}

}  // namespace

std::optional<std::size_t> dual_distance(const LinearCode& code, std::size_t weight_cap) {
  if (weight_cap < 1) throw std::invalid_argument("weight_cap must be >= 1");
  const auto syn = code.column_syndromes();
  std::unordered_map<std::uint64_t, std::size_t> last_pos;
  for (std::size_t i = 0; i < syn.size(); ++i) last_pos[syn[i]] = i;
  for (std::size_t w = 1; w <= std::min(weight_cap, code.m()); ++w)
    if (find_dual_support(syn, last_pos, w, 0, 0)) return w;
  return std::nullopt;
}

const char* to_string(Closeness c) {
  switch (c) {
    case Closeness::Close: return "close";
    case Closeness::Separated: return "separated";
    case Closeness::Neither: return "neither";
  }
  return "?";
}

Closeness closeness_class(const LinearCode& code, BitRef w, double eta, double beta, std::size_t cap, Exec exec) {
  if (code.n() > cap)
    throw CapExceeded("closeness_class enumerates 2^" + std::to_string(code.n()) + " codewords, above cap");
  if (w.size() != code.m()) throw LengthMismatch(w.size(), code.m());
  const CosetScan scan = kernels::scan_coset(code.columns(), w, exec);
  const bool close = static_cast<double>(scan.min_weight) <= eta * static_cast<double>(code.m());
  bool separated = true;
  for (std::size_t k = 0; k < scan.histogram.size() && separated; ++k)
    if (scan.histogram[k] != 0 && !is_balanced_weight(k, code.m(), beta)) separated = false;
  if (close && separated) {
    std::clog << "ncp: closeness_class: word is both close and separated (eta=" << eta << ", beta=" << beta
              << "); reporting close\n";
  }
  if (close) return Closeness::Close;
  return separated ? Closeness::Separated : Closeness::Neither;
}

void write_code(std::ostream& out, const LinearCode& code) { out << canonical_text(code.columns()); }

void write_audit_comment(std::ostream& out, const BalanceAudit& audit) {
  out << "# beta_star=" << format_double(audit.beta_star) << " witness=" << audit.witness.to_string();
  if (audit.estimated) out << " estimated=" << audit.samples;
  out << '\n';
}

namespace {

std::size_t parse_key(std::string_view token, std::string_view key) {
  if (token.substr(0, key.size()) != key) throw std::invalid_argument("expected '" + std::string(key) + "'");
  std::size_t v = 0;
  auto s = token.substr(key.size());
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw std::invalid_argument("bad value in '" + std::string(token) + "'");
  return v;
}

}  // namespace

CodeFile read_code(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty code file");
  std::istringstream hs(line);
  std::string magic, version, mt, nt;
  hs >> magic >> version >> mt >> nt;
  if (magic != "ncp-code" || version != "v1") throw std::invalid_argument("not an ncp-code v1 file");
  const std::size_t m = parse_key(mt, "m=");
  const std::size_t n = parse_key(nt, "n=");

  std::vector<BitVec> cols;
  std::optional<BalanceAudit> audit;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream cs(line.substr(1));
      std::string tok;
      BalanceAudit a;
      bool have = false;
      while (cs >> tok) {
        if (tok.rfind("beta_star=", 0) == 0) {
          a.beta_star = std::stod(tok.substr(10));
          have = true;
        } else if (tok.rfind("witness=", 0) == 0) {
          a.witness = BitVec::parse(tok.substr(8));
        } else if (tok.rfind("estimated=", 0) == 0) {
          a.estimated = true;
          a.samples = std::stoull(tok.substr(10));
        }
      }
      if (have) audit = a;
      continue;
    }
    cols.push_back(BitVec::parse(line));
    if (cols.back().size() != m) throw std::invalid_argument("generator column length differs from m");
  }
  if (cols.size() != n) throw std::invalid_argument("expected " + std::to_string(n) + " generator columns");
  return CodeFile{LinearCode::from_columns(cols), audit};
}

CodeFile load_code(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_code(in);
}

void save_code(const std::string& path, const LinearCode& code, const BalanceAudit* audit) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_code(out, code);
  if (audit) write_audit_comment(out, *audit);
}

}  // namespace ncp

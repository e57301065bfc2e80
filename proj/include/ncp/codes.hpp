#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncp/exec.hpp"
#include "ncp/f2.hpp"
#include "ncp/rng.hpp"

namespace ncp {

/// Largest message length for exhaustive enumeration of the code.
inline constexpr std::size_t kEnumerationCap = 24;
/// Syndromes and messages are packed into one machine word.
inline constexpr std::size_t kMaxMessageBits = 64;

class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Binary linear code {C·x : x in F2^n} with generator C of size m×n.
class LinearCode {
 public:
  /// `columns` holds the n generator columns (an n×m matrix). Throws unless
  /// the columns are linearly independent and m > n.
  explicit LinearCode(BitMatrix columns);

  static LinearCode from_columns(std::span<const BitVec> columns);

  std::size_t m() const { return columns_.cols(); }
  std::size_t n() const { return columns_.rows(); }

  /// m×n; row i holds coordinate i of every column.
  const BitMatrix& generator() const { return generator_; }
  /// n×m; row j is generator column j.
  const BitMatrix& columns() const { return columns_; }
  /// (m−n)×m basis of the dual code.
  const BitMatrix& dual_basis() const { return dual_basis_; }
  /// Entry i is generator row i as an n-bit value: the syndrome of unit vector u_i.
  std::span<const std::uint64_t> column_syndromes() const { return syndromes_; }

  BitVec encode(BitRef x) const;
  BitVec encode_bits(std::uint64_t x) const;
  /// XOR of column_syndromes over the support of w; zero iff w is a dual codeword.
  std::uint64_t syndrome(BitRef w) const;

  /// Subcode with generator column i removed.
  LinearCode drop_column(std::size_t i) const;

  /// 16 hex digits of FNV-1a over the canonical code-file text.
  const std::string& hash() const { return hash_; }

 private:
  BitMatrix columns_;
  BitMatrix generator_;
  BitMatrix dual_basis_;
  std::vector<std::uint64_t> syndromes_;
  std::string hash_;
};

/// Uniform generator, resampled until it has rank n.
LinearCode random_code(std::size_t m, std::size_t n, RngStream& rng);

struct BalanceAudit {
  double beta_star = 0.0;  // max over nonzero codewords of |1 − 2·wt(v)/m|
  BitVec witness;          // message of an extremal codeword
  bool estimated = false;  // true when produced by sampling rather than enumeration
  std::uint64_t samples = 0;
};

BalanceAudit audit_balance(const LinearCode& code, std::size_t cap = kEnumerationCap, Exec exec = Exec::Parallel);

/// Lower estimate of beta_star from `samples` uniformly drawn nonzero messages.
BalanceAudit estimate_balance(const LinearCode& code, std::uint64_t samples, RngStream& rng);

/// True when wt lies in ½(1 ± beta)·m.
bool is_balanced_weight(std::size_t wt, std::size_t m, double beta);

/// Minimum weight of a nonzero dual codeword, or nullopt when it exceeds weight_cap.
std::optional<std::size_t> dual_distance(const LinearCode& code, std::size_t weight_cap = 8);

enum class Closeness { Close, Separated, Neither };

const char* to_string(Closeness c);

Closeness closeness_class(const LinearCode& code, BitRef w, double eta, double beta,
                          std::size_t cap = kEnumerationCap, Exec exec = Exec::Parallel);

// Code file: "ncp-code v1 m=<m> n=<n>", then one generator column per line,
// then optional "# beta_star=<float> witness=<x-bits>" comments.

struct CodeFile {
  LinearCode code;
  std::optional<BalanceAudit> audit;
};

void write_code(std::ostream& out, const LinearCode& code);
void write_audit_comment(std::ostream& out, const BalanceAudit& audit);
CodeFile read_code(std::istream& in);
CodeFile load_code(const std::string& path);
void save_code(const std::string& path, const LinearCode& code, const BalanceAudit* audit = nullptr);

std::string format_double(double v);

}  // namespace ncp

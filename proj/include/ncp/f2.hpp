#pragma once

// Bit-packed vectors and matrices over F2.
//
// Bit j of a vector lives in bit (j % 64) of word (j / 64). Padding bits past
// the logical length are always zero, so word-wise popcounts and comparisons
// never need masking.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ncp {

inline constexpr std::size_t kWordBits = 64;

constexpr std::size_t word_count(std::size_t bits) { return (bits + kWordBits - 1) / kWordBits; }

constexpr std::uint64_t tail_mask(std::size_t bits) {
  const std::size_t r = bits % kWordBits;
  return r == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << r) - 1;
}

class LengthMismatch : public std::invalid_argument {
 public:
  LengthMismatch(std::size_t a, std::size_t b)
      : std::invalid_argument("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

/// Read-only view of a packed bit vector (a BitVec or a BitMatrix row).
class BitRef {
 public:
  BitRef() = default;
  BitRef(std::span<const std::uint64_t> words, std::size_t len) : words_(words), len_(len) {}

  std::size_t size() const { return len_; }
  std::span<const std::uint64_t> words() const { return words_; }
  bool operator[](std::size_t i) const { return (words_[i / kWordBits] >> (i % kWordBits)) & 1U; }

 private:
  std::span<const std::uint64_t> words_;
  std::size_t len_ = 0;
};

class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(std::size_t len) : len_(len), words_(word_count(len), 0) {}
  BitVec(BitRef r) : len_(r.size()), words_(r.words().begin(), r.words().end()) {}

  static BitVec unit(std::size_t len, std::size_t i);
  static BitVec ones(std::size_t len);
  /// Low `len` bits of `bits` (len <= 64).
  static BitVec from_uint(std::size_t len, std::uint64_t bits);
  /// Parses the '0'/'1' text form, coordinate 0 first.
  static BitVec parse(std::string_view text);

  std::size_t size() const { return len_; }
  bool empty() const { return len_ == 0; }

  bool operator[](std::size_t i) const { return (words_[i / kWordBits] >> (i % kWordBits)) & 1U; }
  bool get(std::size_t i) const;
  void set(std::size_t i, bool value = true);
  void flip(std::size_t i) { words_[i / kWordBits] ^= std::uint64_t{1} << (i % kWordBits); }

  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> words() { return words_; }

  operator BitRef() const { return BitRef(words_, len_); }

  BitVec& operator^=(BitRef other);
  BitVec& operator&=(BitRef other);

  /// Low 64 coordinates packed into an integer (bit j = coordinate j).
  std::uint64_t to_uint() const { return words_.empty() ? 0 : words_[0]; }
  std::string to_string() const;

  friend bool operator==(const BitVec& a, const BitVec& b) = default;

 private:
  std::size_t len_ = 0;
  std::vector<std::uint64_t> words_;
};

BitVec operator^(BitRef a, BitRef b);
BitVec operator&(BitRef a, BitRef b);
bool operator==(BitRef a, BitRef b);

std::size_t weight(BitRef v);
/// Inner product over F2; throws LengthMismatch.
bool dot(BitRef a, BitRef b);

inline bool dot_words(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc ^= a[i] & b[i];
  return std::popcount(acc) & 1;
}

std::string to_string(BitRef v);

/// Dense row-major matrix over F2 with contiguous word storage.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), stride_(word_count(cols)), data_(rows * stride_, 0) {}

  static BitMatrix identity(std::size_t k);
  static BitMatrix from_rows(std::span<const BitVec> rows, std::size_t cols);
  /// One '0'/'1' string per row; all rows must have equal length.
  static BitMatrix parse(std::span<const std::string> lines);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t stride() const { return stride_; }

  BitRef row(std::size_t i) const { return BitRef(row_words(i), cols_); }
  std::span<const std::uint64_t> row_words(std::size_t i) const {
    return {data_.data() + i * stride_, stride_};
  }
  std::span<std::uint64_t> row_words(std::size_t i) { return {data_.data() + i * stride_, stride_}; }
  std::span<const std::uint64_t> data() const { return data_; }

  bool get(std::size_t r, std::size_t c) const {
    return (data_[r * stride_ + c / kWordBits] >> (c % kWordBits)) & 1U;
  }
  void set(std::size_t r, std::size_t c, bool value = true);
  void flip(std::size_t r, std::size_t c) {
    data_[r * stride_ + c / kWordBits] ^= std::uint64_t{1} << (c % kWordBits);
  }

  void set_row(std::size_t r, BitRef v);
  void append_row(BitRef v);
  void xor_row_into(std::size_t src, std::size_t dst);
  void swap_rows(std::size_t a, std::size_t b);

  BitMatrix transpose() const;
  /// M·x for x of length cols(); result has length rows().
  BitVec multiply(BitRef x) const;

  std::string to_string() const;

  friend bool operator==(const BitMatrix& a, const BitMatrix& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t stride_ = 0;
  std::vector<std::uint64_t> data_;
};

/// Reduces `m` in place to reduced row echelon form over its first
/// `col_limit` columns; returns the pivot column of each leading row.
std::vector<std::size_t> reduce_rows(BitMatrix& m, std::size_t col_limit);

std::size_t rank(const BitMatrix& m);

/// Rows form a basis of {x : M·x = 0}.
BitMatrix nullspace_basis(const BitMatrix& m);

/// Some x with M·x = y, or nullopt when y is outside the column span.
/// Free variables (only present without full column rank) are set to zero.
std::optional<BitVec> solve(const BitMatrix& m, BitRef y);

}  // namespace ncp

#include "ncp/f2.hpp"

#include <algorithm>
#include <utility>

namespace ncp {

namespace {

void check_same(std::size_t a, std::size_t b) {
  if (a != b) throw LengthMismatch(a, b);
}

}  // namespace

BitVec BitVec::unit(std::size_t len, std::size_t i) {
  BitVec v(len);
  v.set(i);
  return v;
}

BitVec BitVec::ones(std::size_t len) {
  BitVec v(len);
  for (auto& w : v.words_) w = ~std::uint64_t{0};
  if (!v.words_.empty()) v.words_.back() &= tail_mask(len);
  return v;
}

BitVec BitVec::from_uint(std::size_t len, std::uint64_t bits) {
  if (len > kWordBits) throw std::invalid_argument("from_uint: length above 64");
  BitVec v(len);
  if (len > 0) v.words_[0] = bits & tail_mask(len);
  return v;
}

BitVec BitVec::parse(std::string_view text) {
  while (!text.empty() && (text.back() == '\r' || text.back() == '\n' || text.back() == ' '))
    text.remove_suffix(1);
  BitVec v(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '1') {
      v.set(i);
    } else if (text[i] != '0') {
      throw std::invalid_argument("bit string contains '" + std::string(1, text[i]) + "'");
    }
  }
  return v;
}

bool BitVec::get(std::size_t i) const {
  if (i >= len_) throw std::out_of_range("BitVec::get");
  return (*this)[i];
}

void BitVec::set(std::size_t i, bool value) {
  if (i >= len_) throw std::out_of_range("BitVec::set");
  const std::uint64_t bit = std::uint64_t{1} << (i % kWordBits);
  if (value) {
    words_[i / kWordBits] |= bit;
  } else {
    words_[i / kWordBits] &= ~bit;
  }
}

BitVec& BitVec::operator^=(BitRef other) {
  check_same(len_, other.size());
  auto o = other.words();
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= o[i];
  return *this;
}

BitVec& BitVec::operator&=(BitRef other) {
  check_same(len_, other.size());
  auto o = other.words();
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o[i];
  return *this;
}

std::string BitVec::to_string() const { return ncp::to_string(*this); }

BitVec operator^(BitRef a, BitRef b) {
  BitVec r(a);
  r ^= b;
  return r;
}

BitVec operator&(BitRef a, BitRef b) {
  BitVec r(a);
  r &= b;
  return r;
}

bool operator==(BitRef a, BitRef b) {
  return a.size() == b.size() && std::ranges::equal(a.words(), b.words());
}

std::size_t weight(BitRef v) {
  std::size_t w = 0;
  for (auto x : v.words()) w += static_cast<std::size_t>(std::popcount(x));
  return w;
}

bool dot(BitRef a, BitRef b) {
  check_same(a.size(), b.size());
  return dot_words(a.words(), b.words());
}

std::string to_string(BitRef v) {
  std::string s(v.size(), '0');
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i]) s[i] = '1';
  return s;
}

BitMatrix BitMatrix::identity(std::size_t k) {
  BitMatrix m(k, k);
  for (std::size_t i = 0; i < k; ++i) m.set(i, i);
  return m;
}

BitMatrix BitMatrix::from_rows(std::span<const BitVec> rows, std::size_t cols) {
  BitMatrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) m.set_row(i, rows[i]);
  return m;
}

BitMatrix BitMatrix::parse(std::span<const std::string> lines) {
  std::vector<BitVec> rows;
  rows.reserve(lines.size());
  for (const auto& l : lines) rows.push_back(BitVec::parse(l));
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  return from_rows(rows, cols);
}

void BitMatrix::set(std::size_t r, std::size_t c, bool value) {
  if (r >= rows_ || c >= cols_) throw std::out_of_range("BitMatrix::set");
  const std::uint64_t bit = std::uint64_t{1} << (c % kWordBits);
  auto& w = data_[r * stride_ + c / kWordBits];
  w = value ? (w | bit) : (w & ~bit);
}

void BitMatrix::set_row(std::size_t r, BitRef v) {
  check_same(cols_, v.size());
  std::ranges::copy(v.words(), row_words(r).begin());
}

void BitMatrix::append_row(BitRef v) {
  check_same(cols_, v.size());
  data_.insert(data_.end(), v.words().begin(), v.words().end());
  ++rows_;
}

void BitMatrix::xor_row_into(std::size_t src, std::size_t dst) {
  const std::uint64_t* s = data_.data() + src * stride_;
  std::uint64_t* d = data_.data() + dst * stride_;
  for (std::size_t i = 0; i < stride_; ++i) d[i] ^= s[i];
}

void BitMatrix::swap_rows(std::size_t a, std::size_t b) {
  if (a == b) return;
  std::swap_ranges(data_.begin() + a * stride_, data_.begin() + (a + 1) * stride_,
                   data_.begin() + b * stride_);
}

BitMatrix BitMatrix::transpose() const {
  BitMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    auto w = row_words(r);
    for (std::size_t k = 0; k < stride_; ++k) {
      std::uint64_t x = w[k];
      while (x) {
        const std::size_t c = k * kWordBits + static_cast<std::size_t>(std::countr_zero(x));
        t.flip(c, r);
        x &= x - 1;
      }
    }
  }
  return t;
}

BitVec BitMatrix::multiply(BitRef x) const {
  check_same(cols_, x.size());
  BitVec y(rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    if (dot_words(row_words(r), x.words())) y.flip(r);
  return y;
}

std::string BitMatrix::to_string() const {
  std::string s;
  for (std::size_t r = 0; r < rows_; ++r) {
    s += ncp::to_string(row(r));
    s += '\n';
  }
  return s;
}

std::vector<std::size_t> reduce_rows(BitMatrix& m, std::size_t col_limit) {
  std::vector<std::size_t> pivots;
  std::size_t lead = 0;
  for (std::size_t c = 0; c < col_limit && lead < m.rows(); ++c) {
    std::size_t p = lead;
    while (p < m.rows() && !m.get(p, c)) ++p;
    if (p == m.rows()) continue;
    m.swap_rows(p, lead);
    for (std::size_t r = 0; r < m.rows(); ++r)
      if (r != lead && m.get(r, c)) m.xor_row_into(lead, r);
    pivots.push_back(c);
    ++lead;
  }
  return pivots;
}

std::size_t rank(const BitMatrix& m) {
  BitMatrix copy = m;
  return reduce_rows(copy, copy.cols()).size();
}

BitMatrix nullspace_basis(const BitMatrix& m) {
  BitMatrix r = m;
  const auto pivots = reduce_rows(r, r.cols());
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : pivots) is_pivot[c] = true;

  BitMatrix basis(0, m.cols());
  for (std::size_t f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    BitVec x(m.cols());
    x.set(f);
    for (std::size_t i = 0; i < pivots.size(); ++i)
      if (r.get(i, f)) x.set(pivots[i]);
    basis.append_row(x);
  }
  return basis;
}

std::optional<BitVec> solve(const BitMatrix& m, BitRef y) {
  check_same(m.rows(), y.size());
  const std::size_t c = m.cols();
  BitMatrix aug(m.rows(), c + 1);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto src = m.row_words(r);
    auto dst = aug.row_words(r);
    std::ranges::copy(src, dst.begin());
    if (y[r]) aug.set(r, c);
  }
  const auto pivots = reduce_rows(aug, c);
  for (std::size_t r = pivots.size(); r < aug.rows(); ++r)
    if (aug.get(r, c)) return std::nullopt;
  BitVec x(c);
  for (std::size_t i = 0; i < pivots.size(); ++i)
    if (aug.get(i, c)) x.set(pivots[i]);
  return x;
}

}  // namespace ncp

#include "modbench/bitvec.hpp"

#include <algorithm>
#include <cassert>

namespace modbench {

namespace {
uint32_t word_count(uint32_t width) { return (width + 63) / 64; }
}  // namespace

BitVec::BitVec(uint32_t width, uint64_t value) : width_(width), words_(word_count(width), 0) {
  if (!words_.empty()) words_[0] = value;
  trim();
}

BitVec BitVec::ones(uint32_t width) {
  BitVec v(width);
  for (auto& w : v.words_) w = ~uint64_t{0};
  v.trim();
  return v;
}

void BitVec::trim() {
  if (words_.empty()) return;
  uint32_t rem = width_ % 64;
  if (rem != 0) words_.back() &= (uint64_t{1} << rem) - 1;
}

bool BitVec::bit(uint32_t i) const {
  if (i >= width_) return false;
  return (words_[i / 64] >> (i % 64)) & 1;
}

void BitVec::set_bit(uint32_t i, bool v) {
  if (i >= width_) return;
  uint64_t mask = uint64_t{1} << (i % 64);
  if (v)
    words_[i / 64] |= mask;
  else
    words_[i / 64] &= ~mask;
}

bool BitVec::is_zero() const {
  return std::all_of(words_.begin(), words_.end(), [](uint64_t w) { return w == 0; });
}

uint64_t BitVec::to_u64() const { return words_.empty() ? 0 : words_[0]; }

int64_t BitVec::to_i64() const {
  uint64_t v = to_u64();
  if (width_ == 0) return 0;
  if (width_ < 64 && msb()) v |= ~uint64_t{0} << width_;
  return static_cast<int64_t>(v);
}

BitVec BitVec::resized(uint32_t width, bool sign) const {
  BitVec r(width);
  uint32_t n = std::min<uint32_t>(word_count(width), static_cast<uint32_t>(words_.size()));
  for (uint32_t i = 0; i < n; ++i) r.words_[i] = words_[i];
  if (sign && width > width_ && msb()) {
    for (uint32_t i = width_; i < width; ++i) r.set_bit(i, true);
  }
  r.trim();
  return r;
}

BitVec BitVec::slice(uint32_t lsb, uint32_t width) const {
  BitVec r(width);
  for (uint32_t i = 0; i < width; ++i) r.set_bit(i, bit(lsb + i));
  return r;
}

BitVec BitVec::operator~() const {
  BitVec r = *this;
  for (auto& w : r.words_) w = ~w;
  r.trim();
  return r;
}

BitVec BitVec::operator&(const BitVec& o) const {
  assert(width_ == o.width_);
  BitVec r = *this;
  for (size_t i = 0; i < words_.size(); ++i) r.words_[i] &= o.words_[i];
  return r;
}

BitVec BitVec::operator|(const BitVec& o) const {
  assert(width_ == o.width_);
  BitVec r = *this;
  for (size_t i = 0; i < words_.size(); ++i) r.words_[i] |= o.words_[i];
  return r;
}

BitVec BitVec::operator^(const BitVec& o) const {
  assert(width_ == o.width_);
  BitVec r = *this;
  for (size_t i = 0; i < words_.size(); ++i) r.words_[i] ^= o.words_[i];
  return r;
}

BitVec BitVec::operator+(const BitVec& o) const {
  assert(width_ == o.width_);
  BitVec r(width_);
  unsigned __int128 carry = 0;
  for (size_t i = 0; i < words_.size(); ++i) {
    unsigned __int128 s = static_cast<unsigned __int128>(words_[i]) + o.words_[i] + carry;
    r.words_[i] = static_cast<uint64_t>(s);
    carry = s >> 64;
  }
  r.trim();
  return r;
}

BitVec BitVec::negated() const { return (~*this) + BitVec(width_, 1); }

BitVec BitVec::operator-(const BitVec& o) const { return *this + o.negated(); }

BitVec BitVec::operator*(const BitVec& o) const {
  assert(width_ == o.width_);
  BitVec r(width_);
  size_t n = words_.size();
  for (size_t i = 0; i < n; ++i) {
    unsigned __int128 carry = 0;
    for (size_t j = 0; i + j < n; ++j) {
      unsigned __int128 cur = static_cast<unsigned __int128>(words_[i]) * o.words_[j] +
                              r.words_[i + j] + carry;
      r.words_[i + j] = static_cast<uint64_t>(cur);
      carry = cur >> 64;
    }
  }
  r.trim();
  return r;
}

BitVec BitVec::shl(uint64_t amount) const {
  BitVec r(width_);
  if (amount >= width_) return r;
  for (uint32_t i = static_cast<uint32_t>(amount); i < width_; ++i) r.set_bit(i, bit(i - amount));
  return r;
}

BitVec BitVec::lshr(uint64_t amount) const {
  BitVec r(width_);
  if (amount >= width_) return r;
  for (uint32_t i = 0; i + amount < width_; ++i) r.set_bit(i, bit(i + amount));
  return r;
}

BitVec BitVec::ashr(uint64_t amount) const {
  bool s = msb();
  BitVec r(width_);
  for (uint32_t i = 0; i < width_; ++i) {
    r.set_bit(i, i + amount < width_ ? bit(static_cast<uint32_t>(i + amount)) : s);
  }
  return r;
}

bool BitVec::ult(const BitVec& o) const {
  assert(width_ == o.width_);
  for (size_t i = words_.size(); i-- > 0;) {
    if (words_[i] != o.words_[i]) return words_[i] < o.words_[i];
  }
  return false;
}

bool BitVec::slt(const BitVec& o) const {
  bool a = msb(), b = o.msb();
  if (a != b) return a;
  return ult(o);
}

bool BitVec::reduce_and() const { return *this == ones(width_); }

bool BitVec::reduce_xor() const {
  bool p = false;
  for (uint64_t w : words_) p ^= __builtin_parityll(w);
  return p;
}

BitVec BitVec::concat(const BitVec& hi, const BitVec& lo) {
  BitVec r = lo.resized(lo.width_ + hi.width_);
  for (uint32_t i = 0; i < hi.width_; ++i) r.set_bit(lo.width_ + i, hi.bit(i));
  return r;
}

std::string BitVec::to_binary() const {
  std::string s;
  s.reserve(width_);
  for (uint32_t i = width_; i-- > 0;) s.push_back(bit(i) ? '1' : '0');
  return s;
}

std::string BitVec::to_hex() const {
  static const char* digits = "0123456789abcdef";
  std::string s;
  uint32_t nibbles = std::max<uint32_t>(1, (width_ + 3) / 4);
  for (uint32_t n = nibbles; n-- > 0;) {
    unsigned d = 0;
    for (uint32_t b = 0; b < 4; ++b) d |= static_cast<unsigned>(bit(n * 4 + b)) << b;
    s.push_back(digits[d]);
  }
  return s;
}

}  // namespace modbench

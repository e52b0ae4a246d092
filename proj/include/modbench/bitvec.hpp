#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace modbench {

// Fixed-width two-valued bit vector. Bits above `width` are always zero.
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(uint32_t width, uint64_t value = 0);

  static BitVec ones(uint32_t width);

  uint32_t width() const { return width_; }
  bool bit(uint32_t i) const;
  void set_bit(uint32_t i, bool v);

  bool is_zero() const;
  bool msb() const { return width_ != 0 && bit(width_ - 1); }
  uint64_t to_u64() const;  // low 64 bits
  int64_t to_i64() const;   // low 64 bits, sign-extended from width

  // Width changes. `sign` selects sign extension when growing.
  BitVec resized(uint32_t width, bool sign = false) const;
  BitVec slice(uint32_t lsb, uint32_t width) const;

  BitVec operator~() const;
  BitVec operator&(const BitVec& o) const;
  BitVec operator|(const BitVec& o) const;
  BitVec operator^(const BitVec& o) const;
  BitVec operator+(const BitVec& o) const;
  BitVec operator-(const BitVec& o) const;
  BitVec operator*(const BitVec& o) const;
  BitVec negated() const;

  BitVec shl(uint64_t amount) const;
  BitVec lshr(uint64_t amount) const;
  BitVec ashr(uint64_t amount) const;

  bool ult(const BitVec& o) const;
  bool slt(const BitVec& o) const;

  bool reduce_and() const;
  bool reduce_or() const { return !is_zero(); }
  bool reduce_xor() const;

  // Concatenation: `hi` occupies the upper bits.
  static BitVec concat(const BitVec& hi, const BitVec& lo);

  std::string to_binary() const;
  std::string to_hex() const;

  bool operator==(const BitVec& o) const = default;

 private:
  void trim();
  uint32_t width_ = 0;
  std::vector<uint64_t> words_;
};

}  // namespace modbench

#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

namespace plateau {

inline constexpr int kMaxDyadicExponent = 62;
inline constexpr double kEpsGeom = 1e-9;

// Exact value mantissa / 2^exponent, kept canonical (odd mantissa, or zero with exponent 0).
class DyadicScalar {
 public:
  constexpr DyadicScalar() = default;
  DyadicScalar(std::int64_t mantissa, int exponent);

  static DyadicScalar integer(std::int64_t v) { return DyadicScalar(v, 0); }
  static DyadicScalar pow2_neg(int k) { return DyadicScalar(1, k); }
  // Exact conversion; empty when x is not a dyadic with exponent <= 62 and a 63-bit mantissa.
  static std::optional<DyadicScalar> from_double(double x);
  static DyadicScalar from_double_or_throw(double x);

  std::int64_t mantissa() const { return mantissa_; }
  int exponent() const { return exponent_; }
  double to_double() const;
  std::string to_string() const;

  // Numerator of the value at denominator 2^e (requires e >= exponent()).
  __int128 scaled(int e) const;
  bool on_lattice(int k) const { return exponent_ <= k; }
  // floor(value * 2^k) as an integer.
  __int128 floor_at(int k) const;

  DyadicScalar operator-() const { return DyadicScalar(-mantissa_, exponent_); }
  friend DyadicScalar operator+(const DyadicScalar& a, const DyadicScalar& b);
  friend DyadicScalar operator-(const DyadicScalar& a, const DyadicScalar& b);
  // Multiplication by 2^-k.
  DyadicScalar shifted(int k) const;

  friend bool operator==(const DyadicScalar& a, const DyadicScalar& b) {
    return a.mantissa_ == b.mantissa_ && a.exponent_ == b.exponent_;
  }
  friend std::strong_ordering operator<=>(const DyadicScalar& a, const DyadicScalar& b);

 private:
  static DyadicScalar from_wide(__int128 num, int exp);

  std::int64_t mantissa_ = 0;
  int exponent_ = 0;
};

}  // namespace plateau

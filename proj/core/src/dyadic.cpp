#include "plateau/dyadic.hpp"

#include <cmath>
#include <limits>

#include "plateau/errors.hpp"

namespace plateau {

namespace {

constexpr __int128 kMantMax = std::numeric_limits<std::int64_t>::max();
constexpr __int128 kMantMin = std::numeric_limits<std::int64_t>::min();

}  // namespace

DyadicScalar::DyadicScalar(std::int64_t mantissa, int exponent) {
  if (exponent < 0) {
    // Integer times 2^|exponent|.
    __int128 v = mantissa;
    for (int i = 0; i < -exponent; ++i) {
      v *= 2;
      if (v > kMantMax || v < kMantMin) throw PrecisionError("dyadic mantissa overflow");
    }
    mantissa = static_cast<std::int64_t>(v);
    exponent = 0;
  }
  while (exponent > 0 && mantissa % 2 == 0) {
    mantissa /= 2;
    --exponent;
  }
  if (mantissa == 0) exponent = 0;
  if (exponent > kMaxDyadicExponent) throw PrecisionError("dyadic exponent exceeds 62");
  mantissa_ = mantissa;
  exponent_ = exponent;
}

DyadicScalar DyadicScalar::from_wide(__int128 num, int exp) {
  while (exp > 0 && num % 2 == 0) {
    num /= 2;
    --exp;
  }
  if (num > kMantMax || num < kMantMin) throw PrecisionError("dyadic mantissa overflow");
  return DyadicScalar(static_cast<std::int64_t>(num), exp);
}

std::optional<DyadicScalar> DyadicScalar::from_double(double x) {
  if (!std::isfinite(x)) return std::nullopt;
  if (x == 0.0) return DyadicScalar();
  int e = 0;
  double frac = std::frexp(x, &e);  // x = frac * 2^e, 0.5 <= |frac| < 1
  // frac * 2^53 is an integer.
  auto m = static_cast<std::int64_t>(std::ldexp(frac, 53));
  int exp = 53 - e;
  while (exp > 0 && m % 2 == 0) {
    m /= 2;
    --exp;
  }
  if (exp > kMaxDyadicExponent) return std::nullopt;
  if (exp < 0) {
    if (exp < -9) return std::nullopt;  // keep the mantissa within 63 bits
    return DyadicScalar(m, exp);
  }
  return DyadicScalar(m, exp);
}

DyadicScalar DyadicScalar::from_double_or_throw(double x) {
  auto v = from_double(x);
  if (!v) throw InputError("value is not a representable dyadic: " + std::to_string(x));
  return *v;
}

double DyadicScalar::to_double() const {
  return std::ldexp(static_cast<double>(mantissa_), -exponent_);
}

std::string DyadicScalar::to_string() const {
  return std::to_string(mantissa_) + "/2^" + std::to_string(exponent_);
}

__int128 DyadicScalar::scaled(int e) const {
  __int128 v = mantissa_;
  for (int i = exponent_; i < e; ++i) v *= 2;
  return v;
}

__int128 DyadicScalar::floor_at(int k) const {
  if (exponent_ <= k) return scaled(k);
  __int128 v = mantissa_;
  int shift = exponent_ - k;
  __int128 div = static_cast<__int128>(1) << shift;
  __int128 q = v / div;
  if (v % div != 0 && v < 0) --q;
  return q;
}

DyadicScalar operator+(const DyadicScalar& a, const DyadicScalar& b) {
  int e = std::max(a.exponent_, b.exponent_);
  return DyadicScalar::from_wide(a.scaled(e) + b.scaled(e), e);
}

DyadicScalar operator-(const DyadicScalar& a, const DyadicScalar& b) {
  int e = std::max(a.exponent_, b.exponent_);
  return DyadicScalar::from_wide(a.scaled(e) - b.scaled(e), e);
}

DyadicScalar DyadicScalar::shifted(int k) const { return DyadicScalar(mantissa_, exponent_ + k); }

std::strong_ordering operator<=>(const DyadicScalar& a, const DyadicScalar& b) {
  int e = std::max(a.exponent_, b.exponent_);
  __int128 x = a.scaled(e);
  __int128 y = b.scaled(e);
  if (x < y) return std::strong_ordering::less;
  if (x > y) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace plateau

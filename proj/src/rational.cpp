#include "greenlinker/rational.hpp"

#include <limits>
#include <numeric>

#include "greenlinker/error.hpp"

namespace greenlinker {

namespace {

using i128 = __int128;

std::int64_t narrow(i128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
    throw OverflowError("rational arithmetic overflowed int64");
  return static_cast<std::int64_t>(v);
}

i128 gcd128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Rational make_reduced(i128 num, i128 den) {
  if (den == 0) throw ValidationError("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const i128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Rational(narrow(num), narrow(den));
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw ValidationError("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = g > 1 ? num / g : num;
  den_ = g > 1 ? den / g : den;
}

Rational Rational::operator+(const Rational& o) const {
  return make_reduced(static_cast<i128>(num_) * o.den_ + static_cast<i128>(o.num_) * den_,
                      static_cast<i128>(den_) * o.den_);
}

Rational Rational::operator-(const Rational& o) const { return *this + (-o); }

Rational Rational::operator*(const Rational& o) const {
  return make_reduced(static_cast<i128>(num_) * o.num_, static_cast<i128>(den_) * o.den_);
}

std::strong_ordering Rational::operator<=>(const Rational& o) const {
  const i128 lhs = static_cast<i128>(num_) * o.den_;
  const i128 rhs = static_cast<i128>(o.num_) * den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string Rational::str() const {
  return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

Mod1Rational::Mod1Rational(std::int64_t num, std::int64_t den) {
  if (den <= 0) throw ValidationError("Mod1Rational denominator must be positive");
  std::int64_t r = num % den;
  if (r < 0) r += den;
  const std::int64_t g = std::gcd(r, den);
  num_ = r / g;
  den_ = den / g;
}

Mod1Rational Mod1Rational::operator+(const Mod1Rational& o) const {
  const Rational sum = Rational(num_, den_) + Rational(o.num_, o.den_);
  return Mod1Rational(sum);
}

Mod1Rational Mod1Rational::operator-() const { return Mod1Rational(-num_, den_); }

Mod1Rational Mod1Rational::operator-(const Mod1Rational& o) const { return *this + (-o); }

Mod1Rational Mod1Rational::times(std::int64_t k) const {
  // Reduce k modulo den first so the product stays small.
  std::int64_t kk = k % den_;
  const i128 prod = static_cast<i128>(num_) * kk;
  const i128 r = prod % den_;
  return Mod1Rational(static_cast<std::int64_t>(r), den_);
}

Rational Mod1Rational::distance_to_zero() const {
  const Rational x(num_, den_);
  const Rational other = Rational(1) - x;
  return x < other ? x : other;
}

bool Mod1Rational::denominator_is_power_of(std::int64_t base) const {
  if (base < 2) return den_ == 1;
  std::int64_t d = den_;
  // Strip every prime factor of base.
  std::int64_t b = base;
  for (std::int64_t p = 2; p * p <= b; ++p) {
    if (b % p != 0) continue;
    while (b % p == 0) b /= p;
    while (d % p == 0) d /= p;
  }
  if (b > 1)
    while (d % b == 0) d /= b;
  return d == 1;
}

std::string Mod1Rational::str() const {
  return num_ == 0 ? "0" : std::to_string(num_) + "/" + std::to_string(den_);
}

std::optional<std::int64_t> checked_pow(std::int64_t base, int exponent) {
  i128 acc = 1;
  for (int i = 0; i < exponent; ++i) {
    acc *= base;
    if (acc > std::numeric_limits<std::int64_t>::max()) return std::nullopt;
  }
  return static_cast<std::int64_t>(acc);
}

Rational dyadic_fraction(std::int64_t winding, std::int64_t base, int depth) {
  while (depth > 0 && winding % base == 0) {
    winding /= base;
    --depth;
  }
  auto den = checked_pow(base, depth);
  if (!den) throw OverflowError("linking denominator exceeds int64 at depth " + std::to_string(depth));
  return Rational(winding, *den);
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }
std::ostream& operator<<(std::ostream& os, const Mod1Rational& r) { return os << r.str(); }

}  // namespace greenlinker

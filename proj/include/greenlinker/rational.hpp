#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace greenlinker {

/// Exact reduced fraction num/den with den > 0.
class Rational {
public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator-() const { return {-num_, den_}; }

  bool operator==(const Rational&) const = default;
  std::strong_ordering operator<=>(const Rational& o) const;

  std::string str() const;

private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// An element of Q/Z: 0 <= num < den, gcd(num, den) = 1.
class Mod1Rational {
public:
  constexpr Mod1Rational() = default;
  Mod1Rational(std::int64_t num, std::int64_t den);
  explicit Mod1Rational(const Rational& r) : Mod1Rational(r.num(), r.den()) {}

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  bool is_zero() const noexcept { return num_ == 0; }
  double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

  Mod1Rational operator+(const Mod1Rational& o) const;
  Mod1Rational operator-(const Mod1Rational& o) const;
  Mod1Rational operator-() const;
  Mod1Rational times(std::int64_t k) const;

  /// Distance to 0 in R/Z, as an exact fraction in [0, 1/2].
  Rational distance_to_zero() const;
  /// True when den divides base^n for some n (den is free of other primes).
  bool denominator_is_power_of(std::int64_t base) const;
  bool denominator_divides(std::int64_t modulus) const { return modulus % den_ == 0; }

  bool operator==(const Mod1Rational&) const = default;
  std::string str() const;

private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// base^exponent, or nullopt when it does not fit in int64.
std::optional<std::int64_t> checked_pow(std::int64_t base, int exponent);

/// winding / base^depth reduced, with the common powers of base cancelled
/// first so deep certificates stay representable. Throws OverflowError when
/// the reduced denominator still does not fit.
Rational dyadic_fraction(std::int64_t winding, std::int64_t base, int depth);

std::ostream& operator<<(std::ostream& os, const Rational& r);
std::ostream& operator<<(std::ostream& os, const Mod1Rational& r);

}  // namespace greenlinker

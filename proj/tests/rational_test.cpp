#include <doctest.h>

#include "greenlinker/error.hpp"
#include "greenlinker/rational.hpp"

using namespace greenlinker;

TEST_CASE("rationals reduce and order") {
  CHECK(Rational(6, -8) == Rational(-3, 4));
  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
  CHECK(Rational(2, 3) * Rational(3, 4) == Rational(1, 2));
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(-1, 2).str() == "-1/2");
  CHECK_THROWS_AS(Rational(1, 0), ValidationError);
}

TEST_CASE("mod 1 classes") {
  CHECK(Mod1Rational(5, 4) == Mod1Rational(1, 4));
  CHECK(Mod1Rational(-1, 4) == Mod1Rational(3, 4));
  CHECK(Mod1Rational(1, 4).times(2) == Mod1Rational(1, 2));
  CHECK(Mod1Rational(1, 4).times(4).is_zero());
  CHECK(-Mod1Rational(1, 4) == Mod1Rational(3, 4));
  CHECK(Mod1Rational(3, 4).distance_to_zero() == Rational(1, 4));
  CHECK(Mod1Rational(1, 9).denominator_is_power_of(3));
  CHECK_FALSE(Mod1Rational(1, 6).denominator_is_power_of(3));
  CHECK(Mod1Rational(0, 1).denominator_is_power_of(3));
  CHECK(Mod1Rational(1, 8).denominator_divides(16));
}

TEST_CASE("dyadic fractions from deep windings") {
  CHECK(dyadic_fraction(16384, 2, 16) == Rational(1, 4));
  CHECK(dyadic_fraction(3, 3, 2) == Rational(1, 3));
  // 2^70 overflows, but the common factor cancels first.
  CHECK(dyadic_fraction(std::int64_t(1) << 60, 2, 70) == Rational(1, 1024));
  CHECK(checked_pow(2, 62).value() == (std::int64_t(1) << 62));
  CHECK_FALSE(checked_pow(2, 63).has_value());
}

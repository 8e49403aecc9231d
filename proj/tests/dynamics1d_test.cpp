#include <doctest.h>

#include <random>

#include "greenlinker/dynamics1d.hpp"
#include "greenlinker/maps.hpp"

using namespace greenlinker;

TEST_CASE("potential of z^2 is log+|z|") {
  const Poly1 p({0, 0, 1.0});
  for (double r : {1.5, 2.0, 10.0, 1e5}) {
    const GreenValue g = green_poly(p, std::polar(r, 0.7));
    CHECK(g.status == GreenStatus::escaped);
    CHECK(g.value == doctest::Approx(std::log(r)).epsilon(1e-12));
  }
  const GreenValue inside = green_poly(p, 0.5);
  CHECK(inside.status == GreenStatus::bounded);
  CHECK(inside.value == 0.0);
}

TEST_CASE("potential of z^2 - 2 matches the Joukowski closed form") {
  // G(z) = log|(z + sqrt(z^2 - 4)) / 2| with the branch of modulus >= 1.
  const Poly1 p({-2.0, 0, 1.0});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int k = 0; k < 100; ++k) {
    const Cx z(u(rng), u(rng));
    Cx x = (z + std::sqrt(z * z - 4.0)) / 2.0;
    if (std::abs(x) < 1.0) x = (z - std::sqrt(z * z - 4.0)) / 2.0;
    const double want = std::log(std::abs(x));
    const GreenValue g = green_poly(p, z);
    CHECK(std::abs(g.value - want) <= g.bound.value + 1e-9);
  }
}

TEST_CASE("functional equation on random points") {
  for (const char* name : {"z2+1", "rabbit-cubic"}) {
    const Poly1 p = *builtin_map(name).poly;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 100; ++k) {
      const Cx z(u(rng), u(rng));
      const GreenValue a = green_poly(p, eval(p, z)), b = green_poly(p, z);
      CHECK(std::abs(a.value - p.degree() * b.value) <= a.bound.value + p.degree() * b.bound.value + 1e-12);
    }
  }
}

TEST_CASE("fixed depth stops exactly there") {
  GreenOptions o;
  o.fixed_depth = 3;
  CHECK(green_poly(Poly1({1.0, 0, 1.0}), 0.1, o).depth == 3);
}

TEST_CASE("critical report of the rabbit cubic") {
  const CriticalReport r = critical_report(*builtin_map("rabbit-cubic").poly, 2000);
  REQUIRE(r.points.size() == 2);
  CHECK(r.escaping_count() == 1);
  int period3 = 0;
  for (const auto& c : r.points)
    if (c.fate == CriticalFate::attracted && c.period == 3) ++period3;
  CHECK(period3 == 1);
}

TEST_CASE("Mandelbrot membership for parameters with known fate") {
  CHECK(mandelbrot_member(0.0, 2000).verdict == MandelbrotVerdict::inside);
  CHECK(mandelbrot_member(-1.0, 2000).period == 2);
  CHECK(mandelbrot_member(0.3, 2000).verdict == MandelbrotVerdict::outside);
  CHECK(mandelbrot_member(-2.1, 2000).verdict == MandelbrotVerdict::outside);
  CHECK(mandelbrot_member(Cx(-0.1226, 0.7449), 2000).verdict == MandelbrotVerdict::inside);  // rabbit centre
  CHECK(detect_period(std::vector<Cx>{1.0, 2.0, 1.0, 2.0}) == 2);
}

TEST_CASE("restriction at infinity of the cubic endomorphism") {
  const RestrictionAtInfinity r = restriction_at_infinity(builtin_map("rabbit-endo").as_endo());
  REQUIRE(r.is_polynomial);
  CHECK(r.polynomial.degree() == 3);
  CHECK(r.polynomial.is_monic());
  CHECK(critical_report(r.polynomial, 2000).escaping_count() == 1);
}

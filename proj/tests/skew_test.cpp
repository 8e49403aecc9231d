#include <doctest.h>

#include <random>

#include "greenlinker/maps.hpp"
#include "greenlinker/skew.hpp"

using namespace greenlinker;

TEST_CASE("skew product validation") {
  CHECK_THROWS_AS(SkewProduct(Poly1({0, 0, 2.0}), Poly2W({Poly1({0.0}), Poly1({0.0}), Poly1({1.0})})), ValidationError);
  CHECK_THROWS_AS(SkewProduct(Poly1({0, 0, 1.0}), Poly2W({Poly1({0.0}), Poly1({1.0})})), ValidationError);
  // Total degree 3 in q.
  CHECK_THROWS_AS(SkewProduct(Poly1({0, 0, 1.0}), Poly2W({Poly1({0, 0, 0, 1.0}), Poly1({0.0}), Poly1({1.0})})),
                  ValidationError);
}

TEST_CASE("homogenize and dehomogenize are inverse") {
  for (const char* name : {"example-0.3", "example-jonsson", "cantor-infinity"}) {
    const SkewProduct f = *builtin_map(name).skew;
    const SkewProduct g = dehomogenize(homogenize(f));
    CHECK(g.p() == f.p());
    CHECK(g.q() == f.q());
    const auto [z1, w1] = f.endo().apply_affine(Cx(0.3, 0.1), Cx(-0.2, 0.5));
    CHECK(std::abs(z1 - eval(f.p(), Cx(0.3, 0.1))) < 1e-15);
    CHECK(std::abs(w1 - f.q().eval(Cx(0.3, 0.1), Cx(-0.2, 0.5))) < 1e-15);
  }
  CHECK_THROWS_AS(dehomogenize(builtin_map("rabbit-endo").as_endo()), ValidationError);
}

TEST_CASE("product map potentials are log+ of the coordinates") {
  const SkewProduct f = *builtin_map("product").skew;
  const FiberContext ctx = make_fiber_context(f, Cx(0.6, 0.0));
  for (double r : {0.5, 1.5, 3.0, 40.0}) {
    const GreenValue fib = green_fiber(f, ctx, std::polar(r, 1.0));
    CHECK(fib.value == doctest::Approx(std::max(0.0, std::log(r))).epsilon(1e-9));
    const GreenValue aff = green_affine(f, Cx(0.6, 0.0), std::polar(r, 1.0));
    CHECK(std::abs(aff.value - std::max(0.0, std::log(r))) <= aff.bound.value + 1e-9);
  }
  // Both coordinates matter off the bidisc.
  const GreenValue g = green_affine(f, 5.0, 2.0);
  CHECK(std::abs(g.value - std::log(5.0)) <= g.bound.value + 1e-9);
}

TEST_CASE("affine potential splits over a bounded base") {
  // On K_p x C, G(z, w) equals the fiber potential.
  const SkewProduct f = *builtin_map("example-0.3").skew;
  const FiberContext ctx = make_fiber_context(f, 0.99999);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 50; ++k) {
    const Cx w(u(rng), u(rng));
    const GreenValue a = green_affine(f, 0.99999, w), b = green_fiber(f, ctx, w);
    CHECK(std::abs(a.value - b.value) <= a.bound.value + b.bound.value + 1e-9);
  }
}

TEST_CASE("connectivity certificates") {
  const SkewProduct f = *builtin_map("example-0.3").skew;
  const ConnectivityCertificate c = connectivity_certificate(f, 0.99999, 10);
  CHECK(c.verdict == ConnectivityVerdict::disconnected);
  REQUIRE(c.witness.has_value());
  CHECK(c.witness->green.certified_positive());
  // a = 0: every fiber map is w^2, with connected Julia set.
  const ConnectivityCertificate p = connectivity_certificate(quadratic_family(0.0), 0.5, 10);
  CHECK(p.verdict == ConnectivityVerdict::no_escaping_critical_point);
}

TEST_CASE("quadratic family classes") {
  CHECK(classify_quadratic_family(0.0).cls == QuadraticClass::ball_basins);
  CHECK(classify_quadratic_family(Cx(0, 0.5)).cls == QuadraticClass::ball_basins);
  CHECK(classify_quadratic_family(1.0).cls == QuadraticClass::infinitely_generated_vertical_basin);
}

TEST_CASE("fiber critical values") {
  const SkewProduct f = *builtin_map("example-0.3").skew;
  const auto cv = fiber_critical_values(f, 2.0);
  REQUIRE(cv.size() == 1);
  CHECK(std::abs(cv[0] - 0.6) < 1e-15);
}

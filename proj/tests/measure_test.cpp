#include <doctest.h>

#include <numbers>

#include "greenlinker/maps.hpp"
#include "greenlinker/measure.hpp"

using namespace greenlinker;

TEST_CASE("backward orbits of z^2 land on the unit circle") {
  const EmpiricalMeasure m = brolin_sample(*builtin_map("z2").poly, 10.0, 30, 2000, 4);
  REQUIRE(m.points.size() == 2000);
  for (const Cx& z : m.points) CHECK(std::abs(std::abs(z) - 1.0) < 1e-6);
  // Uniform on the circle: a quarter sector holds a quarter of the mass.
  const OrientedLoop sector = quarter_sector_loop(0.0, 2.0, 0.1).with_fiber(Ambient::plane, std::nullopt);
  const MassEstimate e = estimate_enclosed_mass(m, sector);
  CHECK(std::abs(e.estimate - 0.25) < 4.0 * e.stderr_);
}

TEST_CASE("sampling is reproducible and thread independent") {
  const Poly1 g = *builtin_map("rabbit-cubic").poly;
  const EmpiricalMeasure a = brolin_sample(g, 20.0, 25, 3000, 99, 1);
  const EmpiricalMeasure b = brolin_sample(g, 20.0, 25, 3000, 99, 4);
  CHECK(a.points == b.points);
  const EmpiricalMeasure c = brolin_sample(g, 20.0, 25, 3000, 100, 1);
  CHECK(a.points != c.points);
  CHECK(sample_stream_seed(1, 2) != sample_stream_seed(2, 1));
}

TEST_CASE("fiber oracle agrees with the exact quarter") {
  const SkewProduct f = *builtin_map("example-0.3").skew;
  const EmpiricalMeasure m = brolin_sample_fiber(f, 0.99999, 10.0, 30, 20000, 5, 2);
  const MassEstimate e = estimate_enclosed_mass(m, quarter_sector_loop(0.99999), 1e-9, 2);
  CHECK(std::abs(e.estimate - 0.25) < 4.0 * e.stderr_);
  CHECK(m.points == brolin_sample_fiber(f, 0.99999, 10.0, 30, 20000, 5, 1).points);
}

TEST_CASE("basepoints inside the escape radius are refused") {
  CHECK_THROWS_AS(brolin_sample(*builtin_map("z2").poly, 0.5, 10, 10, 1), ValidationError);
}

TEST_CASE("dyadic snapping") {
  CHECK(snap_to_dyadic(0.2491, 0.00137, 2, 8) == Mod1Rational(1, 4));
  CHECK(snap_to_dyadic(0.5004, 0.001, 2, 8) == Mod1Rational(1, 2));
  CHECK(snap_to_dyadic(0.3334, 0.001, 3, 5) == Mod1Rational(1, 3));
  CHECK_FALSE(snap_to_dyadic(0.26, 0.001, 2, 8).has_value());
  CHECK_FALSE(snap_to_dyadic(0.3, 0.2, 2, 8).has_value());
}

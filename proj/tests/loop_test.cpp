#include <doctest.h>

#include <numbers>

#include "greenlinker/loop.hpp"
#include "greenlinker/maps.hpp"

using namespace greenlinker;

TEST_CASE("circle winding and orientation") {
  const OrientedLoop c = OrientedLoop::circle(Cx(1.0, 1.0), 2.0);
  CHECK(c.winding_number(Cx(1.0, 1.5)) == 1);
  CHECK(c.reversed().winding_number(Cx(1.0, 1.5)) == -1);
  CHECK(c.winding_number(Cx(5.0, 0.0)) == 0);
  CHECK(c.length() == doctest::Approx(4.0 * std::numbers::pi));
  CHECK(std::abs(c.at(0.0) - c.at(1.0)) < 1e-12);
  CHECK_THROWS_AS(c.winding_number(Cx(3.0, 1.0)), ValidationError);
}

TEST_CASE("polygon and open paths") {
  const OrientedLoop sq = OrientedLoop::polygon({0.0, 1.0, Cx(1, 1), Cx(0, 1)});
  CHECK(sq.winding_number(Cx(0.5, 0.5)) == 1);
  CHECK(sq.length() == doctest::Approx(4.0));
  CHECK(std::abs(sq.at(0.375) - Cx(1.0, 0.5)) < 1e-12);
  CHECK_THROWS_AS(OrientedLoop(Ambient::plane, {PolylineSegment{{0.0, 1.0}}}), ValidationError);
  CHECK_THROWS_AS(OrientedLoop::circle(0.0, 1.0, Ambient::fiber), ValidationError);
}

TEST_CASE("quarter sector loop") {
  const OrientedLoop q = quarter_sector_loop(0.99999);
  CHECK(q.ambient() == Ambient::fiber);
  CHECK(q.winding_number(Cx(0.5, 0.5)) == 1);
  CHECK(q.winding_number(Cx(-0.5, 0.5)) == 0);
  CHECK(q.length() == doctest::Approx(4.0 + std::numbers::pi));
  const OrientedLoop r = quarter_sector_loop(0.99999, 2.0, std::numbers::pi / 2);
  CHECK(r.winding_number(Cx(-0.5, 0.5)) == 1);
}

TEST_CASE("flatten honours the step and transformed moves points") {
  const OrientedLoop c = OrientedLoop::circle(0.0, 1.0);
  const auto pts = c.flatten(0.01);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(std::abs(pts[(i + 1) % pts.size()] - pts[i]) <= 0.01 + 1e-12);
  const OrientedLoop t = c.transformed(2.0, Cx(1.0, 0.0));
  CHECK(t.winding_number(Cx(2.5, 0.0)) == 1);
  CHECK(t.max_modulus() == doctest::Approx(3.0));
}

TEST_CASE("bridge concatenation adds windings") {
  const OrientedLoop a = OrientedLoop::circle(-2.0, 1.0), b = OrientedLoop::circle(2.0, 1.0);
  const OrientedLoop ab = concatenate_with_bridge(a, b);
  CHECK(ab.winding_number(Cx(-2.0, 0.5)) == 1);
  CHECK(ab.winding_number(Cx(2.0, 0.5)) == 1);
  CHECK(ab.winding_number(Cx(0.0, 3.0)) == 0);
}

#include <doctest.h>

#include "greenlinker/contour.hpp"
#include "greenlinker/linking.hpp"
#include "greenlinker/maps.hpp"

using namespace greenlinker;

TEST_CASE("one-variable linking for z^2") {
  const Poly1 p = *builtin_map("z2").poly;
  const LinkResult all = linking_poly_1d(p, OrientedLoop::circle(0.0, 2.0));
  CHECK(all.lk.is_zero());
  CHECK(all.pairing == Rational(1));
  const LinkResult none = linking_poly_1d(p, OrientedLoop::circle(3.0, 0.5));
  CHECK(none.pairing == Rational(0));
  CHECK(linking_poly_1d(p, OrientedLoop::circle(0.0, 2.0).reversed()).pairing == Rational(-1));
}

TEST_CASE("fiber linking for the quarter loop") {
  const SkewProduct f = *builtin_map("example-0.3").skew;
  const FiberContext ctx = make_fiber_context(f, 0.99999);
  const OrientedLoop q = quarter_sector_loop(0.99999);
  const LinkResult r = linking_fiber(f, ctx, q);
  CHECK(r.lk == Mod1Rational(1, 4));
  CHECK(r.pairing == Rational(1, 4));
  CHECK(r.cert.stabilization_checked);
  CHECK(r.cert.winding_next == 2 * r.cert.winding);
  CHECK(linking_fiber(f, ctx, q.reversed()).lk == Mod1Rational(3, 4));
  // Total mass of the harmonic measure is 1.
  CHECK(linking_fiber(f, ctx, OrientedLoop::circle(0.0, 2.0, Ambient::fiber, 0.99999)).pairing == Rational(1));

  LinkingOptions fine;
  fine.initial_samples = 2048;
  fine.extra_depth = 4;
  CHECK(linking_fiber(f, ctx, q, fine).lk == r.lk);
}

TEST_CASE("loops through the filled set are refused") {
  const SkewProduct f = *builtin_map("example-0.3").skew;
  const FiberContext ctx = make_fiber_context(f, 0.99999);
  CHECK_THROWS_AS(linking_fiber(f, ctx, OrientedLoop::circle(0.0, 0.5, Ambient::fiber, 0.99999)),
                  JuliaIntersectionError);
  CHECK_THROWS_AS(linking_fiber(f, ctx, OrientedLoop::circle(0.0, 2.0)), ValidationError);
}

TEST_CASE("pushforward multiplies linking by the degree") {
  const SkewProduct f = *builtin_map("example-0.3").skew;
  const OrientedLoop q = quarter_sector_loop(0.99999);
  const OrientedLoop image = push_forward_loop(f, q);
  REQUIRE(image.fiber().has_value());
  CHECK(std::abs(*image.fiber() - 0.99999 * 0.99999) < 1e-15);
  const LinkResult r = linking_fiber(f, make_fiber_context(f, *image.fiber()), image);
  CHECK(r.lk == Mod1Rational(1, 2));
}

TEST_CASE("lifting the rotated quarter loop") {
  const SkewProduct f = *builtin_map("example-0.3").skew;
  const OrientedLoop q = quarter_sector_loop(0.99999, 2.0, 0.01);
  const Cx z1 = default_backward_chooser(f.p())(0.99999);
  CHECK(std::abs(z1 - std::sqrt(0.99999)) < 1e-12);
  const LiftBundle b = lift_loop(f, z1, q);
  int sum = 0;
  const FiberContext ctx = make_fiber_context(f, z1);
  for (const auto& l : b.loops) {
    sum += l.covering_degree;
    CHECK(linking_fiber(f, ctx, l.loop).lk.times(2) == Mod1Rational(1, 4).times(l.covering_degree));
  }
  CHECK(sum == 2);
  CHECK(b.max_residual < 1e-9);
  CHECK(count_enclosed_critical_values(f, z1, q) == 0);
  // The axis-aligned sector passes through the critical value of q_{z1}.
  CHECK_THROWS_AS(lift_loop(f, z1, quarter_sector_loop(0.99999)), PerturbationRequiredError);
}

TEST_CASE("monodromy of the product map") {
  const SkewProduct f = *builtin_map("product").skew;
  const LiftBundle big = lift_loop(f, 1.0, OrientedLoop::circle(0.0, 4.0, Ambient::fiber, 1.0));
  REQUIRE(big.loops.size() == 1);
  CHECK(big.loops[0].covering_degree == 2);
  CHECK(big.loops[0].loop.winding_number(0.0) == 1);
  const LiftBundle small = lift_loop(f, 1.0, OrientedLoop::circle(4.0, 0.5, Ambient::fiber, 1.0));
  REQUIRE(small.loops.size() == 2);
  CHECK(small.loops[0].covering_degree == 1);
}

TEST_CASE("separating loops of a Cantor Julia set") {
  const Poly1 g = *builtin_map("z2+1").poly;
  SeparationOptions so;
  so.grid = default_grid(escape_radius(g), 200);
  const SeparationResult s = find_separating_loops(g, default_separation_level(g), so);
  REQUIRE(s.loops.size() == 2);
  for (const auto& l : s.loops) {
    CHECK(l.link.lk == Mod1Rational(1, 2));
    // Each half maps onto the whole set.
    CHECK(linking_poly_1d(g, push_forward_loop(g, l.loop)).pairing == Rational(1));
  }
  const LiftBundle b = lift_loop(g, OrientedLoop::circle(0.0, 3.0));
  REQUIRE(b.loops.size() == 1);
  CHECK(b.loops[0].covering_degree == 2);
}

TEST_CASE("linking at infinity for the cubic endomorphism") {
  const PolyEndo2 e = builtin_map("rabbit-endo").as_endo();
  const RestrictionAtInfinity ri = restriction_at_infinity(e);
  const double r = std::abs(ri.chart_scale) * escape_radius(ri.polynomial);
  CHECK(linking_at_infinity(e, OrientedLoop::circle(0.0, 1.5 * r)).lk.is_zero());
  CHECK(linking_at_infinity(e, OrientedLoop::circle(0.0, 1.5 * r)).pairing == Rational(1));
}

TEST_CASE("a short linking sequence") {
  const SkewProduct f = *builtin_map("example-0.3").skew;
  const LinkingSequence s = generate_linking_sequence(f, 0.99999, quarter_sector_loop(0.99999), 2);
  REQUIRE(s.steps.size() == 3);
  CHECK_FALSE(s.truncated);
  CHECK(s.contraction_holds);
  CHECK(s.steps[1].link.lk == Mod1Rational(1, 8));
  CHECK(s.steps[2].link.lk == Mod1Rational(1, 16));
  for (const auto& st : s.steps) CHECK(st.pairing_identity);
}

#include <doctest.h>

#include <numbers>

#include "greenlinker/contour.hpp"
#include "greenlinker/maps.hpp"

using namespace greenlinker;

namespace {

std::vector<double> sample(const GridSpec& g, double (*field)(Cx)) {
  const int n = g.resolution + 1;
  std::vector<double> v(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(j) * n + i] = field(g.node(i, j));
  return v;
}

double perimeter(const std::vector<Cx>& pts) {
  double s = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) s += std::abs(pts[(i + 1) % pts.size()] - pts[i]);
  return s;
}

}  // namespace

TEST_CASE("a circle level set is one counterclockwise curve") {
  const GridSpec g{0.0, 2.0, 100};
  const LevelCurves c = marching_squares(sample(g, [](Cx x) { return std::abs(x); }), g, 1.0);
  REQUIRE(c.closed.size() == 1);
  CHECK(c.open == 0);
  CHECK(perimeter(c.closed[0]) == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-3));
  CHECK(OrientedLoop::polygon(c.closed[0]).winding_number(0.0) == 1);
  for (const Cx& p : c.closed[0]) CHECK(std::abs(std::abs(p) - 1.0) < 2e-3);
}

TEST_CASE("refined crossings sit on the level set") {
  const GridSpec g{0.0, 2.0, 20};
  auto f = [](Cx x) { return std::abs(x); };
  const LevelCurves c = marching_squares(sample(g, [](Cx x) { return std::abs(x); }), g, 1.0, f);
  REQUIRE(c.closed.size() == 1);
  for (const Cx& p : c.closed[0]) CHECK(std::abs(std::abs(p) - 1.0) < 1e-8);
}

TEST_CASE("two wells give two curves and open curves are counted") {
  const GridSpec g{0.0, 2.0, 160};
  const LevelCurves two =
      marching_squares(sample(g, [](Cx x) { return std::min(std::abs(x - 1.0), std::abs(x + 1.0)); }), g, 0.5);
  CHECK(two.closed.size() == 2);
  const LevelCurves open = marching_squares(sample(g, [](Cx x) { return x.real(); }), g, 0.0);
  CHECK(open.closed.empty());
  CHECK(open.open == 1);
}

TEST_CASE("saddle cells are resolved consistently") {
  // x*y has a saddle at the grid centre; |x y| < 0.01 forms a connected cross.
  const GridSpec g{0.0, 1.0, 41};
  const LevelCurves c = marching_squares(sample(g, [](Cx x) { return x.real() * x.imag(); }), g, 0.0);
  CHECK(c.closed.empty());
  CHECK(c.open == 2);
}

TEST_CASE("separating loops in a fiber are deterministic across threads") {
  const SkewProduct f = *builtin_map("cantor-infinity").skew;
  const FiberContext ctx = make_fiber_context(f, Cx(0.5, 0.0));
  const double level = default_separation_level(f, ctx);
  SeparationOptions a;
  a.grid = default_grid(ctx.radius, 120);
  SeparationOptions b = a;
  b.threads = 3;
  const SeparationResult ra = find_separating_loops(f, ctx, level, a);
  const SeparationResult rb = find_separating_loops(f, ctx, level, b);
  REQUIRE(ra.loops.size() == rb.loops.size());
  for (std::size_t i = 0; i < ra.loops.size(); ++i) {
    CHECK(ra.loops[i].link.lk == rb.loops[i].link.lk);
    CHECK(ra.loops[i].loop.flatten(1.0) == rb.loops[i].loop.flatten(1.0));
  }
  Rational total(0);
  for (const auto& l : ra.loops) total = total + l.link.pairing;
  CHECK(ra.loops.size() == 2);
  CHECK(total == Rational(1));
}

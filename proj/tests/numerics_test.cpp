#include <doctest.h>

#include <algorithm>
#include <random>

#include "greenlinker/numerics.hpp"

using namespace greenlinker;

namespace {

Poly1 from_roots(const std::vector<Cx>& rs) {
  Poly1 p({1.0});
  for (const Cx& r : rs) p = p * Poly1({-r, 1.0});
  return p;
}

double match_error(std::vector<Cx> got, std::vector<Cx> want) {
  double worst = 0.0;
  for (const Cx& w : want) {
    auto it = std::min_element(got.begin(), got.end(), [&](Cx a, Cx b) { return std::abs(a - w) < std::abs(b - w); });
    worst = std::max(worst, std::abs(*it - w));
    got.erase(it);
  }
  return worst;
}

}  // namespace

TEST_CASE("roots recover the roots a polynomial was built from") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int deg = 1; deg <= 7; ++deg) {
    std::vector<Cx> want;
    for (int k = 0; k < deg; ++k) want.emplace_back(u(rng), u(rng));
    const auto got = roots(from_roots(want));
    REQUIRE(got.size() == want.size());
    CHECK(match_error(got, want) < 1e-8);
  }
}

TEST_CASE("roots of unity") {
  const auto got = roots(Poly1({-1.0, 0, 0, 0, 0, 1.0}));
  std::vector<Cx> want;
  for (int k = 0; k < 5; ++k) want.push_back(std::polar(1.0, 2.0 * 3.141592653589793 * k / 5));
  CHECK(match_error(got, want) < 1e-12);
}

TEST_CASE("escape radius forces doubling") {
  const std::vector<Poly1> polys{Poly1({0.3, 0, 1.0}), Poly1({-2.0, 0, 1.0}), Poly1({Cx(0.7, 0.5), -0.48, 0, 1.0})};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ang(0.0, 6.283185307179586), stretch(1.0001, 50.0);
  for (const auto& p : polys) {
    const double r = escape_radius(p);
    CHECK(r >= 2.0);
    for (int k = 0; k < 200; ++k) {
      const Cx x = std::polar(r * stretch(rng), ang(rng));
      const double px = std::abs(eval(p, x));
      CHECK(px >= 2.0 * std::abs(x));
      CHECK(px >= std::pow(std::abs(x), p.degree()) / 2.0);
    }
  }
}

TEST_CASE("polynomial algebra") {
  const Poly1 p({1.0, 2.0, 3.0});
  const Poly1 q({0.0, 1.0, 1.0});
  const Cx x(0.3, -0.7);
  CHECK(std::abs(eval(p.compose(q), x) - eval(p, eval(q, x))) < 1e-14);
  CHECK(std::abs(eval(p * q, x) - eval(p, x) * eval(q, x)) < 1e-14);
  CHECK(p.derivative() == Poly1({2.0, 6.0}));
  const auto [v, dv] = eval_with_deriv(p, x);
  CHECK(std::abs(v - eval(p, x)) < 1e-15);
  CHECK(std::abs(dv - eval(p.derivative(), x)) < 1e-15);
}

TEST_CASE("fiber polynomial in two variables") {
  const Poly2W q({Poly1({0.0, 0.3}), Poly1({0.0}), Poly1({1.0})});
  CHECK(q.is_monic_in_w());
  CHECK(q.total_degree() == 2);
  CHECK(q.fiber(2.0) == Poly1({0.6, 0.0, 1.0}));
  CHECK(std::abs(q.eval(2.0, 1.0) - 1.6) < 1e-15);
}

TEST_CASE("evaluation overflow is reported") {
  CHECK_THROWS_AS(eval(Poly1({0, 0, 1.0}), Cx(1e200, 0)), OverflowError);
}

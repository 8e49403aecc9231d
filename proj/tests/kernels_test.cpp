#include <doctest.h>

#include <random>

#include "greenlinker/kernels.hpp"
#include "greenlinker/maps.hpp"
#include "greenlinker/skew.hpp"

using namespace greenlinker;
using namespace greenlinker::kernels;

namespace {

FiberStepTable table_for(const SkewProduct& f, Cx z0, int steps) {
  const FiberContext ctx = make_fiber_context(f, z0, steps);
  FiberStepTable t;
  t.degree = f.degree();
  t.steps = steps;
  t.radius = ctx.radius;
  for (int k = 0; k < steps; ++k) {
    const Poly1 q = f.fiber_map(ctx.orbit[static_cast<std::size_t>(k)]);
    for (int j = 0; j < t.degree; ++j) t.lower.push_back(q.coeff(j));
  }
  return t;
}

}  // namespace

TEST_CASE("scalar fiber kernel matches direct iteration") {
  const SkewProduct f = *builtin_map("example-0.3").skew;
  const FiberStepTable t = table_for(f, 0.99999, 40);
  const FiberContext ctx = make_fiber_context(f, 0.99999, 40);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int k = 0; k < 500; ++k) {
    const Cx w(u(rng), u(rng));
    int out = 0;
    detail::fiber_escape_steps_scalar(t, {&w, 1}, {&out, 1});
    int want = -1;
    Cx x = w;
    for (int s = 0; s <= 40; ++s) {
      if (std::abs(x) > t.radius) {
        want = s;
        break;
      }
      if (s < 40) x = eval(f.fiber_map(ctx.orbit[static_cast<std::size_t>(s)]), x);
    }
    CHECK(out == want);
  }
}

TEST_CASE("AVX2 fiber kernel agrees exactly with scalar") {
  if (!avx2_available()) return;
  for (const char* name : {"example-0.3", "example-jonsson", "rabbit-endo"}) {
    const MapSpec m = builtin_map(name);
    if (!m.skew) continue;
    const FiberStepTable t = table_for(*m.skew, m.name == "example-jonsson" ? Cx(-2.0) : Cx(0.99999), 60);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (std::size_t n : {1u, 3u, 4u, 5u, 17u, 1000u}) {
      std::vector<Cx> w(n);
      for (auto& x : w) x = Cx(u(rng), u(rng));
      std::vector<int> a(n), b(n);
      detail::fiber_escape_steps_scalar(t, w, a);
      detail::fiber_escape_steps_avx2(t, w, b);
      CHECK(a == b);
    }
  }
}

TEST_CASE("AVX2 cubic fiber kernel agrees exactly with scalar") {
  if (!avx2_available()) return;
  FiberStepTable t;
  t.degree = 3;
  t.steps = 30;
  t.radius = 4.0;
  for (int k = 0; k < 30; ++k) {
    t.lower.push_back(Cx(0.1 * k, -0.2));
    t.lower.push_back(Cx(-0.48, 0.0));
    t.lower.push_back(Cx(0.0, 0.05));
  }
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<Cx> w(777);
  for (auto& x : w) x = Cx(u(rng), u(rng));
  std::vector<int> a(w.size()), b(w.size());
  detail::fiber_escape_steps_scalar(t, w, a);
  detail::fiber_escape_steps_avx2(t, w, b);
  CHECK(a == b);
}

TEST_CASE("AVX2 quadratic orbit kernel agrees exactly with scalar") {
  if (!avx2_available()) return;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.2, 1.0);
  for (std::size_t n : {1u, 2u, 4u, 7u, 513u}) {
    std::vector<Cx> a(n);
    for (auto& x : a) x = Cx(u(rng), u(rng) * 0.6);
    const int iters = 300, tail = 20;
    std::vector<int> e1(n), e2(n);
    std::vector<Cx> t1(n * tail), t2(n * tail);
    detail::quadratic_orbits_scalar(a, iters, tail, e1, t1);
    detail::quadratic_orbits_avx2(a, iters, tail, e2, t2);
    CHECK(e1 == e2);
    for (std::size_t i = 0; i < n; ++i)
      if (e1[i] < 0)
        for (int k = 0; k < tail; ++k) CHECK(t1[i * tail + k] == t2[i * tail + k]);
  }
}

TEST_CASE("dispatch validates its inputs") {
  FiberStepTable t;
  t.steps = 5;
  std::vector<Cx> w(2);
  std::vector<int> out(1);
  CHECK_THROWS_AS(fiber_escape_steps(t, w, out), ValidationError);
}

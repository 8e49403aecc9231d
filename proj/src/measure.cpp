#include "greenlinker/measure.hpp"

#include <cmath>
#include <random>

#include "greenlinker/parallel.hpp"

namespace greenlinker {

std::uint64_t sample_stream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  // splitmix64 of the combined key
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

namespace {

EmpiricalMeasure sample_impl(const std::vector<Poly1>& maps_outer_first, Cx basepoint, int count, std::uint64_t seed,
                             int threads) {
  const int depth = static_cast<int>(maps_outer_first.size());
  EmpiricalMeasure m;
  m.seed = seed;
  m.depth = depth;
  m.count = count;
  m.points.resize(static_cast<std::size_t>(count));
  std::vector<int> fails(static_cast<std::size_t>(count), 0);
  std::atomic<long> total_fail{0};
  const long fail_cap = std::max<long>(1, count / 100);
  parallel_for(static_cast<std::size_t>(count), threads, [&](std::size_t i) {
    std::mt19937_64 rng(sample_stream_seed(seed, i));
    Cx x = basepoint;
    for (int k = 0; k < depth; ++k) {
      const Poly1& q = maps_outer_first[static_cast<std::size_t>(k)];
      std::uniform_int_distribution<int> pick(0, q.degree() - 1);
      for (;;) {
        std::vector<Cx> c(q.coeffs());
        c[0] -= x;
        try {
          const std::vector<Cx> rs = roots(Poly1(std::move(c)));
          x = rs[static_cast<std::size_t>(pick(rng))];
          break;
        } catch (const NonConvergenceError&) {
          ++fails[i];
          if (++total_fail > fail_cap)
            throw NonConvergenceError("more than 1% of backward branches failed to converge", {});
        }
      }
    }
    m.points[i] = x;
  });
  for (int f : fails) m.failures += f;
  return m;
}

}  // namespace

EmpiricalMeasure brolin_sample(const Poly1& g, Cx basepoint, int depth, int count, std::uint64_t seed, int threads) {
  if (g.degree() < 2 || !g.is_monic()) throw ValidationError("brolin_sample needs a monic polynomial of degree >= 2");
  if (depth < 0 || count < 1) throw ValidationError("brolin_sample needs depth >= 0 and count >= 1");
  if (!(std::abs(basepoint) > escape_radius(g)))
    throw ValidationError("basepoint must lie outside the escape radius");
  return sample_impl(std::vector<Poly1>(static_cast<std::size_t>(depth), g), basepoint, count, seed, threads);
}

EmpiricalMeasure brolin_sample_fiber(const SkewProduct& f, Cx z0, Cx basepoint, int depth, int count,
                                     std::uint64_t seed, int threads) {
  if (depth < 0 || count < 1) throw ValidationError("brolin_sample_fiber needs depth >= 0 and count >= 1");
  const FiberContext ctx = make_fiber_context(f, z0, std::max(depth, 1));
  if (ctx.base_escapes || ctx.depth() < depth)
    throw UnsupportedError("fiber sampling needs a bounded base orbit through the requested depth");
  if (!(std::abs(basepoint) > ctx.radius)) throw ValidationError("basepoint must lie outside the fiber escape radius");
  std::vector<Poly1> maps;
  for (int k = depth - 1; k >= 0; --k) maps.push_back(f.fiber_map(ctx.orbit[static_cast<std::size_t>(k)]));
  return sample_impl(maps, basepoint, count, seed, threads);
}

MassEstimate estimate_enclosed_mass(const EmpiricalMeasure& m, const OrientedLoop& loop, double discard_tol,
                                    int threads) {
  MassEstimate e;
  if (loop.is_point() || m.points.empty()) {
    e.used = static_cast<int>(m.points.size());
    return e;
  }
  std::vector<int> wind(m.points.size(), 0);
  std::vector<char> drop(m.points.size(), 0);
  parallel_for(m.points.size(), threads, [&](std::size_t i) {
    if (loop.distance_to(m.points[i]) <= discard_tol) {
      drop[i] = 1;
      return;
    }
    wind[i] = loop.winding_number(m.points[i], 0.0);
  }, 256);
  long inside = 0;
  for (std::size_t i = 0; i < wind.size(); ++i) {
    if (drop[i]) {
      ++e.discarded;
      continue;
    }
    ++e.used;
    if (wind[i] % 2 != 0) ++inside;
  }
  if (e.used == 0) return e;
  const double p = static_cast<double>(inside) / e.used;
  e.estimate = p;
  e.stderr_ = std::sqrt(p * (1.0 - p) / e.used);
  return e;
}

std::optional<Mod1Rational> snap_to_dyadic(double estimate, double stderr_, int d, int n_max) {
  if (d < 2) throw ValidationError("snap_to_dyadic needs d >= 2");
  if (!(stderr_ >= 0.0) || !std::isfinite(estimate)) throw ValidationError("snap_to_dyadic: invalid estimate");
  std::int64_t den = 1;
  for (int n = 0; n <= n_max; ++n) {
    const double scaled = estimate * static_cast<double>(den);
    const double k = std::round(scaled);
    const double nearest = std::abs(k / den - estimate);
    // The runner-up sits on the other side of the estimate.
    const double k2 = scaled >= k ? k + 1.0 : k - 1.0;
    const double second = std::abs(k2 / den - estimate);
    if (nearest <= 3.0 * stderr_ && second > 6.0 * stderr_)
      return Mod1Rational(static_cast<std::int64_t>(k), den);
    if (n < n_max) {
      const auto next = checked_pow(d, n + 1);
      if (!next) break;
      den = *next;
    }
  }
  return std::nullopt;
}

}  // namespace greenlinker

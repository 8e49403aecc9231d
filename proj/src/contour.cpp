#include "greenlinker/contour.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "greenlinker/parallel.hpp"

namespace greenlinker {

namespace {

struct Seg {
  long from, to;  // edge ids
  Cx a, b;
};

}  // namespace

LevelCurves marching_squares(const std::vector<double>& values, const GridSpec& grid, double level,
                             const std::function<double(Cx)>& refine) {
  const int r = grid.resolution;
  const long n = r + 1;
  if (r < 1 || static_cast<long>(values.size()) != n * n) throw ValidationError("marching_squares: grid size mismatch");
  auto val = [&](int i, int j) { return values[static_cast<std::size_t>(j * n + i)]; };
  auto h_id = [&](int i, int j) { return static_cast<long>(j) * r + i; };           // (i,j)-(i+1,j)
  auto v_id = [&](int i, int j) { return n * r + static_cast<long>(j) * n + i; };  // (i,j)-(i,j+1)
  auto cross = [&](int i0, int j0, int i1, int j1) {
    const double a = val(i0, j0), b = val(i1, j1);
    const Cx p0 = grid.node(i0, j0), p1 = grid.node(i1, j1);
    if (!refine) return p0 + std::clamp((level - a) / (b - a), 1e-9, 1.0 - 1e-9) * (p1 - p0);
    double lo = 0.0, hi = 1.0;  // value(lo) on the side of a
    for (int it = 0; it < 30; ++it) {
      const double mid = 0.5 * (lo + hi);
      ((refine(p0 + mid * (p1 - p0)) < level) == (a < level) ? lo : hi) = mid;
    }
    return p0 + std::clamp(0.5 * (lo + hi), 1e-9, 1.0 - 1e-9) * (p1 - p0);
  };

  std::vector<Seg> segs;
  for (int j = 0; j < r; ++j)
    for (int i = 0; i < r; ++i) {
      // corners: 0 (i,j), 1 (i+1,j), 2 (i+1,j+1), 3 (i,j+1)
      const int ci[4] = {i, i + 1, i + 1, i};
      const int cj[4] = {j, j, j + 1, j + 1};
      bool in[4];
      int mask = 0;
      for (int c = 0; c < 4; ++c) {
        in[c] = val(ci[c], cj[c]) < level;
        mask |= in[c] << c;
      }
      if (mask == 0 || mask == 15) continue;
      // edges: 0 bottom, 1 right, 2 top, 3 left
      const long eid[4] = {h_id(i, j), v_id(i + 1, j), h_id(i, j + 1), v_id(i, j)};
      const int ea[4] = {0, 1, 3, 0};  // corner endpoints of each edge
      const int eb[4] = {1, 2, 2, 3};
      Cx ep[4];
      bool cut[4];
      for (int e = 0; e < 4; ++e) {
        cut[e] = in[ea[e]] != in[eb[e]];
        if (cut[e]) ep[e] = cross(ci[ea[e]], cj[ea[e]], ci[eb[e]], cj[eb[e]]);
      }
      // Pairs of cut edges with the corner each pair cuts off.
      std::vector<std::pair<std::pair<int, int>, int>> pairs;
      if (mask == 5 || mask == 10) {
        const double centre = 0.25 * (val(i, j) + val(i + 1, j) + val(i + 1, j + 1) + val(i, j + 1));
        const bool centre_in = centre < level;
        // Cut off the corners that are not connected through the centre.
        const bool cut_odd = (mask == 5) == centre_in;
        if (cut_odd) {
          pairs.push_back({{0, 1}, 1});
          pairs.push_back({{2, 3}, 3});
        } else {
          pairs.push_back({{3, 0}, 0});
          pairs.push_back({{1, 2}, 2});
        }
      } else {
        int e1 = -1, e2 = -1;
        for (int e = 0; e < 4; ++e)
          if (cut[e]) (e1 < 0 ? e1 : e2) = e;
        pairs.push_back({{e1, e2}, ea[e1]});
      }
      for (const auto& [pe, corner] : pairs) {
        Seg s{eid[pe.first], eid[pe.second], ep[pe.first], ep[pe.second]};
        const Cx pc = grid.node(ci[corner], cj[corner]);
        const double side = ((s.b - s.a) * std::conj(pc - s.a)).imag();  // < 0: corner on the left
        const bool left = side < 0.0;
        if (left != in[corner]) {
          std::swap(s.from, s.to);
          std::swap(s.a, s.b);
        }
        segs.push_back(s);
      }
    }

  std::unordered_map<long, std::size_t> by_from, by_to;
  by_from.reserve(segs.size());
  by_to.reserve(segs.size());
  for (std::size_t k = 0; k < segs.size(); ++k) {
    by_from[segs[k].from] = k;
    by_to[segs[k].to] = k;
  }
  std::vector<char> used(segs.size(), 0);
  LevelCurves out;
  for (std::size_t k = 0; k < segs.size(); ++k) {
    if (used[k]) continue;
    // Walk back to the start of an open chain, or once around a closed one.
    std::size_t start = k;
    bool closed = true;
    for (;;) {
      auto it = by_to.find(segs[start].from);
      if (it == by_to.end()) {
        closed = false;
        break;
      }
      if (it->second == k) break;
      start = it->second;
    }
    std::vector<Cx> pts;
    std::size_t cur = start;
    for (;;) {
      used[cur] = 1;
      pts.push_back(segs[cur].a);
      auto it = by_from.find(segs[cur].to);
      if (it == by_from.end() || used[it->second]) break;
      cur = it->second;
    }
    if (closed && pts.size() >= 3)
      out.closed.push_back(std::move(pts));
    else
      ++out.open;
  }
  return out;
}

namespace {

using Field = std::function<double(Cx)>;
using Linker = std::function<LinkResult(const OrientedLoop&)>;

// Point of {field = level} on the line m + t * dir, t > 0, or m itself.
Cx push_to_level(const Field& field, double level, Cx m, Cx dir, double scale) {
  const bool below = field(m) < level;
  double lo = 0.0, hi = -1.0;
  for (double t = scale / 16; t <= 4 * scale; t *= 2) {
    if ((field(m + t * dir) < level) != below) {
      hi = t;
      break;
    }
    lo = t;
  }
  if (hi < 0.0) return m;
  for (int it = 0; it < 30; ++it) {
    const double mid = 0.5 * (lo + hi);
    ((field(m + mid * dir) < level) == below ? lo : hi) = mid;
  }
  return m + hi * dir;
}

// G / |grad G|, a proxy for the distance to the zero set.
double distance_estimate(const Field& field, Cx p) {
  const double v = field(p);
  const double h = 1e-7 * std::max(1.0, std::abs(p));
  const double gx = field(p + h) - field(p - h);
  const double gy = field(p + Cx(0.0, h)) - field(p - Cx(0.0, h));
  const double grad = std::hypot(gx, gy) / (2.0 * h);
  return grad > 0.0 ? v / grad : std::numeric_limits<double>::infinity();
}

// Probe points of a chord checked against the level.
constexpr double kProbes[] = {0.25, 0.5, 0.75};

// Chords are split at a point of the level curve until each is short against
// the distance estimate at its ends and no probe dips below 3/4 of the level.
void refine_edge(const Field& field, double level, Cx a, double da, Cx b, double db, int depth, std::vector<Cx>& out) {
  const double len = std::abs(b - a);
  bool ok = depth == 0 || len == 0.0 || len <= 0.25 * std::min(da, db);
  if (!ok) {
    ok = len <= std::min(da, db);
    for (double s : kProbes) ok = ok && field(a + s * (b - a)) >= 0.75 * level;
  }
  if (ok) {
    out.push_back(b);
    return;
  }
  const Cx m = 0.5 * (a + b);
  const Cx normal = Cx(0.0, -1.0) * (b - a) / len;  // outward: {G < level} lies to the left
  Cx p = push_to_level(field, level, m, field(m) < level ? normal : -normal, len);
  if (p == m && field(m) < 0.5 * level) {
    out.push_back(b);  // left for certification to reject
    return;
  }
  const double dp = distance_estimate(field, p);
  refine_edge(field, level, a, da, p, dp, depth - 1, out);
  refine_edge(field, level, p, dp, b, db, depth - 1, out);
}

std::vector<Cx> refine_polyline(const Field& field, double level, const std::vector<Cx>& pts) {
  std::vector<Cx> out;
  out.reserve(pts.size());
  std::vector<double> dist(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) dist[k] = distance_estimate(field, pts[k]);
  out.push_back(pts[0]);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const std::size_t n = (k + 1) % pts.size();
    refine_edge(field, level, pts[k], dist[k], pts[n], dist[n], 24, out);
  }
  out.pop_back();  // the closing vertex repeats pts[0]
  return out;
}

SeparationResult separate(const Field& field, double level, const SeparationOptions& o, Ambient ambient,
                          std::optional<Cx> fiber, const Linker& link) {
  if (!(level > 0.0)) throw ValidationError("separation level must be positive");
  const GridSpec& g = o.grid;
  if (g.resolution < 2 || !(g.half_extent > 0.0)) throw ValidationError("invalid contour grid");
  const std::size_t n = static_cast<std::size_t>(g.resolution) + 1;
  std::vector<double> values(n * n);
  parallel_for(n * n, o.threads, [&](std::size_t k) {
    values[k] = field(g.node(static_cast<int>(k % n), static_cast<int>(k / n)));
  }, 64);
  LevelCurves curves = marching_squares(values, g, level, field);
  SeparationResult res;
  res.level = level;
  res.open_contours = curves.open;
  if (curves.open > 0)
    res.warnings.push_back(std::to_string(curves.open) + " contour(s) reach the grid boundary and were discarded");
  // Contours are refined and linked independently.
  struct Outcome {
    std::optional<SeparatingLoop> loop;
    std::string warning;
  };
  std::vector<Outcome> outcomes(curves.closed.size());
  parallel_for(curves.closed.size(), o.threads, [&](std::size_t c) {
    std::vector<Cx> pts = refine_polyline(field, level, curves.closed[c]);
    bool certified = true;
    for (std::size_t k = 0; k < pts.size() && certified; ++k) {
      const Cx a = pts[k], b = pts[(k + 1) % pts.size()];
      certified = field(a) >= 0.5 * level;
      for (double s : kProbes) certified = certified && field(a + s * (b - a)) >= 0.5 * level;
    }
    if (!certified) {
      outcomes[c].warning = "contour rejected: G falls below level / 2 on it";
      return;
    }
    OrientedLoop loop = OrientedLoop::polygon(std::move(pts), ambient, fiber);
    try {
      LinkResult lr = link(loop);
      outcomes[c].loop = SeparatingLoop{std::move(loop), std::move(lr)};
    } catch (const Error& e) {
      outcomes[c].warning = std::string("contour rejected: ") + e.what();
    }
  }, 1);
  for (auto& out : outcomes) {
    if (out.loop) {
      res.loops.push_back(std::move(*out.loop));
    } else {
      ++res.rejected;
      res.warnings.push_back(out.warning);
    }
  }
  return res;
}

double green_or_zero(const GreenValue& g) { return g.status == GreenStatus::escaped ? g.value : 0.0; }

}  // namespace

SeparationResult find_separating_loops(const Poly1& g, double level, const SeparationOptions& opts) {
  return separate([&](Cx x) { return green_or_zero(green_poly(g, x)); }, level, opts, Ambient::plane, std::nullopt,
                  [&](const OrientedLoop& l) { return linking_poly_1d(g, l, opts.linking); });
}

SeparationResult find_separating_loops(const SkewProduct& f, const FiberContext& ctx, double level,
                                       const SeparationOptions& opts) {
  return separate([&](Cx w) { return green_or_zero(green_fiber(f, ctx, w)); }, level, opts, Ambient::fiber, ctx.z0,
                  [&](const OrientedLoop& l) { return linking_fiber(f, ctx, l, opts.linking); });
}

SeparationResult find_separating_loops(const PolyEndo2& endo, double level, const SeparationOptions& opts) {
  const RestrictionAtInfinity r = restriction_at_infinity(endo);
  if (!r.is_polynomial) throw UnsupportedError("restriction to the line at infinity is not polynomial in a chart");
  // Work in the chart coordinate; the monic conjugate lives in xi = zeta / beta.
  const Cx beta = r.chart_scale;
  return separate([&](Cx x) { return green_or_zero(green_poly(r.polynomial, x / beta)); }, level, opts,
                  Ambient::plane, std::nullopt,
                  [&](const OrientedLoop& l) { return linking_at_infinity(endo, l, opts.linking); });
}

double default_separation_level(const Poly1& g, int generation) {
  if (generation < 1) throw ValidationError("generation must be >= 1");
  double best = std::numeric_limits<double>::infinity();
  for (const Cx& c : roots(g.derivative())) {
    const GreenValue gv = green_poly(g, c);
    if (gv.certified_positive()) best = std::min(best, gv.value / std::pow(g.degree(), generation - 1));
  }
  return std::isfinite(best) ? 0.75 * best : 0.1;
}

double default_separation_level(const SkewProduct& f, const FiberContext& ctx, int generation) {
  if (generation < 1) throw ValidationError("generation must be >= 1");
  double best = std::numeric_limits<double>::infinity();
  const int d = f.degree();
  for (int k = 0; k < generation && k < ctx.depth(); ++k) {
    const FiberContext sub = ctx.shifted(k);
    for (const Cx& c : fiber_critical_points(f, sub.z0)) {
      const GreenValue gv = green_fiber(f, sub, c);
      if (gv.certified_positive()) best = std::min(best, gv.value / std::pow(d, k));
    }
  }
  return std::isfinite(best) ? 0.75 * best : 0.1;
}

GridSpec default_grid(double radius, int resolution) {
  GridSpec g;
  g.center = 0.0;
  g.half_extent = 1.25 * radius;
  g.resolution = resolution;
  return g;
}

}  // namespace greenlinker

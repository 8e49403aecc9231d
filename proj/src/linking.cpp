#include "greenlinker/linking.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "greenlinker/dynamics1d.hpp"
#include "greenlinker/kernels.hpp"

namespace greenlinker {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;
constexpr double kGuard = std::numbers::pi / 2;

// The maps applied along an orbit plus one escape radius valid for all of them.
struct OrbitView {
  int degree = 2;
  double radius = 2.0;
  std::vector<Poly1> maps;
  kernels::FiberStepTable table;
};

OrbitView make_view(std::vector<Poly1> maps, double radius, int escape_depth) {
  OrbitView v;
  v.degree = maps.front().degree();
  v.radius = radius;
  v.maps = std::move(maps);
  v.table.degree = v.degree;
  v.table.radius = radius;
  v.table.steps = std::min<int>(escape_depth, static_cast<int>(v.maps.size()));
  v.table.lower.reserve(static_cast<std::size_t>(v.table.steps) * v.degree);
  for (int k = 0; k < v.table.steps; ++k)
    for (int j = 0; j < v.degree; ++j) v.table.lower.push_back(v.maps[static_cast<std::size_t>(k)].coeff(j));
  return v;
}

OrbitView fiber_view(const SkewProduct& f, const FiberContext& ctx, const LinkingOptions& o) {
  if (ctx.base_escapes) throw UnsupportedError("linking in a fiber over an escaping base point is not supported");
  const int need = o.max_depth + o.extra_depth + o.stabilization_retries + 2;
  if (ctx.depth() < need)
    throw ValidationError("fiber context too shallow for the requested linking depth (" + std::to_string(ctx.depth()) +
                          " < " + std::to_string(need) + ")");
  std::vector<Poly1> maps;
  maps.reserve(static_cast<std::size_t>(need));
  for (int k = 0; k < need; ++k) maps.push_back(f.fiber_map(ctx.orbit[static_cast<std::size_t>(k)]));
  return make_view(std::move(maps), ctx.radius, o.max_depth);
}

OrbitView poly_view(const Poly1& g, const LinkingOptions& o) {
  if (g.degree() < 2 || !g.is_monic()) throw ValidationError("linking needs a monic polynomial of degree >= 2");
  const int need = o.max_depth + o.extra_depth + o.stabilization_retries + 2;
  return make_view(std::vector<Poly1>(static_cast<std::size_t>(need), g), escape_radius(g), o.max_depth);
}

struct Phases {
  double a0 = 0.0;  // arg at depth n
  double a1 = 0.0;  // arg at depth n + 1
  double logm = 0.0;
  /// |d log w_{n+1} / d w_0|: local rotation rate of the image argument.
  double speed = 0.0;
};

Phases image_phases(const OrbitView& v, Cx w, int n) {
  const int d = v.degree;
  const double thr = log_form_threshold(d);
  Phases ph;
  Cx x = w;
  // lambda = (d w_k / d w_0) / w_k, seeded after the first step so that
  // w_0 = 0 is not special.
  Cx lambda = 0.0;
  int k = 0;
  for (; k <= n; ++k) {
    if (std::abs(x) > thr) break;
    if (k == n) {
      ph.a0 = std::arg(x);
      ph.logm = std::log(std::abs(x));
    }
    auto [val, der] = eval_with_deriv(v.maps[static_cast<std::size_t>(k)], x);
    lambda = k == 0 ? der / val : lambda * (x * der / val);
    x = val;
  }
  if (k == n + 1) {
    ph.a1 = std::arg(x);
    ph.speed = std::abs(lambda);
    return ph;
  }
  // Log form from step k on: only the phase and log-modulus survive.
  double lm = std::log(std::abs(x));
  Cx u = x / std::abs(x);
  for (; k <= n + 1; ++k) {
    if (k == n) {
      ph.a0 = std::arg(u);
      ph.logm = lm;
    }
    if (k == n + 1) {
      ph.a1 = std::arg(u);
      break;
    }
    Cx p = 1.0;
    for (int j = 0; j < d; ++j) p = cmul(p, u);
    u = p / std::abs(p);
    lm *= d;
    lambda *= static_cast<double>(d);
  }
  ph.speed = std::abs(lambda);
  return ph;
}

double wrapped(double a) { return std::remainder(a, kTwoPi); }

struct Sample {
  double t;
  Cx w;
  int esc;
  Phases ph;
};

void escape_steps(const OrbitView& v, std::vector<Sample>& s, std::size_t from) {
  std::vector<Cx> pts;
  pts.reserve(s.size() - from);
  for (std::size_t i = from; i < s.size(); ++i) pts.push_back(s[i].w);
  std::vector<int> esc(pts.size());
  kernels::fiber_escape_steps(v.table, pts, esc);
  for (std::size_t i = from; i < s.size(); ++i) s[i].esc = esc[i - from];
}

LinkResult zero_result(const std::string& reason, int samples) {
  LinkResult r;
  r.cert.reason = reason;
  r.cert.samples = samples;
  r.cert.initial_samples = samples;
  return r;
}

LinkResult wind(const OrbitView& v, const OrientedLoop& loop, const LinkingOptions& o) {
  if (o.initial_samples < 4) throw ValidationError("linking needs at least 4 initial samples");
  const int d = v.degree;
  if (loop.is_point()) return zero_result("point loop", 1);

  std::vector<Sample> s;
  {
    const std::vector<Cx> pts = loop.sample(o.initial_samples);
    s.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
      s.push_back({static_cast<double>(i) / o.initial_samples, pts[i], -1, {}});
  }
  escape_steps(v, s, 0);
  const auto bounded = std::count_if(s.begin(), s.end(), [](const Sample& x) { return x.esc < 0; });
  if (bounded == static_cast<long>(s.size()))
    return zero_result("null-homologous in bounded component", o.initial_samples);
  auto reject = [&](const Sample& x) {
    throw JuliaIntersectionError("loop meets the Julia set at sampling resolution (t = " + std::to_string(x.t) + ")",
                                 x.t, x.w);
  };
  for (const Sample& x : s)
    if (x.esc < 0) reject(x);

  int max_esc = 0;
  for (const Sample& x : s) max_esc = std::max(max_esc, x.esc);
  int extra = o.extra_depth;
  const int depth_cap = static_cast<int>(v.maps.size()) - 2;

  for (int attempt = 0; attempt <= o.stabilization_retries; ++attempt, ++extra) {
    int n = max_esc + extra;
    if (n > depth_cap) throw NotCertifiedError("certification depth exceeds the available orbit");
    for (Sample& x : s) x.ph = image_phases(v, x.w, n);

    for (;;) {
      std::vector<Sample> fresh;
      for (std::size_t i = 0; i < s.size(); ++i) {
        const Sample& a = s[i];
        const Sample& b = s[(i + 1) % s.size()];
        const double tb = i + 1 == s.size() ? b.t + 1.0 : b.t;
        // Phase steps below pi/2, and a first-order bound on the rotation
        // across the gap so whole turns cannot alias away.
        const double budget = (tb - a.t) * loop.length() * std::max(a.ph.speed, b.ph.speed);
        if (std::abs(wrapped(b.ph.a0 - a.ph.a0)) >= kGuard || std::abs(wrapped(b.ph.a1 - a.ph.a1)) >= kGuard ||
            budget >= kGuard) {
          const double tm = 0.5 * (a.t + tb);
          if (tm - a.t < 1e-15) throw NotCertifiedError("argument refinement reached parameter resolution");
          fresh.push_back({tm >= 1.0 ? tm - 1.0 : tm, loop.at(tm), -1, {}});
        }
      }
      if (fresh.empty()) break;
      if (s.size() + fresh.size() > static_cast<std::size_t>(o.max_samples))
        throw NotCertifiedError("argument refinement exceeded max_samples = " + std::to_string(o.max_samples));
      const std::size_t from = s.size();
      s.insert(s.end(), fresh.begin(), fresh.end());
      escape_steps(v, s, from);
      int fresh_max = max_esc;
      for (std::size_t i = from; i < s.size(); ++i) {
        if (s[i].esc < 0) reject(s[i]);
        fresh_max = std::max(fresh_max, s[i].esc);
      }
      if (fresh_max > max_esc) {
        max_esc = fresh_max;
        n = max_esc + extra;
        if (n > depth_cap) throw NotCertifiedError("certification depth exceeds the available orbit");
        for (std::size_t i = 0; i < from; ++i) s[i].ph = image_phases(v, s[i].w, n);
      }
      for (std::size_t i = from; i < s.size(); ++i) s[i].ph = image_phases(v, s[i].w, n);
      std::sort(s.begin(), s.end(), [](const Sample& a, const Sample& b) { return a.t < b.t; });
    }

    double sum0 = 0.0, sum1 = 0.0, minlog = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.size(); ++i) {
      const Sample& a = s[i];
      const Sample& b = s[(i + 1) % s.size()];
      sum0 += wrapped(b.ph.a0 - a.ph.a0);
      sum1 += wrapped(b.ph.a1 - a.ph.a1);
      minlog = std::min(minlog, a.ph.logm);
    }
    const double w0 = sum0 / kTwoPi, w1 = sum1 / kTwoPi;
    const auto W0 = static_cast<std::int64_t>(std::llround(w0));
    const auto W1 = static_cast<std::int64_t>(std::llround(w1));
    if (std::abs(w0 - W0) > 1e-6 || std::abs(w1 - W1) > 1e-6)
      throw NotCertifiedError("winding sum is not an integer multiple of 2 pi");
    if (W1 != d * W0) continue;

    LinkResult r;
    r.cert.depth = n;
    r.cert.winding = W0;
    r.cert.winding_next = W1;
    r.cert.stabilization_checked = true;
    r.cert.min_image_log_modulus = minlog;
    r.cert.samples = static_cast<int>(s.size());
    r.cert.initial_samples = o.initial_samples;
    r.cert.max_escape_step = max_esc;
    r.pairing = dyadic_fraction(W0, d, n);
    r.lk = Mod1Rational(r.pairing);
    return r;
  }
  throw NotCertifiedError("winding stabilization W_{n+1} = d W_n failed after retries");
}

void check_fiber(const OrientedLoop& loop, Cx z0) {
  if (loop.ambient() != Ambient::fiber || !loop.fiber())
    throw ValidationError("expected a loop in a vertical fiber");
  const Cx z = *loop.fiber();
  if (std::abs(z - z0) > 1e-12 * std::max(1.0, std::abs(z0)))
    throw ValidationError("loop fiber does not match the context base point");
}

}  // namespace

LinkResult linking_fiber(const SkewProduct& f, const FiberContext& ctx, const OrientedLoop& loop,
                         const LinkingOptions& opts) {
  check_fiber(loop, ctx.z0);
  return wind(fiber_view(f, ctx, opts), loop, opts);
}

LinkResult linking_poly_1d(const Poly1& g, const OrientedLoop& loop, const LinkingOptions& opts) {
  if (loop.ambient() == Ambient::affine_plane) throw ValidationError("expected a plane loop");
  return wind(poly_view(g, opts), loop, opts);
}

LinkResult linking_at_infinity(const PolyEndo2& endo, const OrientedLoop& loop, const LinkingOptions& opts) {
  const RestrictionAtInfinity r = restriction_at_infinity(endo);
  if (!r.is_polynomial)
    throw UnsupportedError("restriction at infinity is not polynomial: exact linking unsupported, use the measure oracle");
  return linking_poly_1d(r.polynomial, loop.transformed(1.0 / r.chart_scale, 0.0), opts);
}

// ---------------------------------------------------------------------------
// Push-forward

namespace {

OrientedLoop push_impl(const Poly1& q, const OrientedLoop& loop, const PushForwardOptions& o, Ambient ambient,
                       std::optional<Cx> fiber) {
  if (loop.is_point()) return OrientedLoop::point(eval(q, loop.at(0.0)), ambient, fiber);
  struct Pt {
    double t;
    Cx img;
  };
  std::vector<Pt> pts;
  for (int i = 0; i < o.initial_points; ++i) {
    const double t = static_cast<double>(i) / o.initial_points;
    pts.push_back({t, eval(q, loop.at(t))});
  }
  double scale = 1.0;
  for (const Pt& p : pts) scale = std::max(scale, std::abs(p.img));
  const double tol = o.geometric_tol * scale;
  for (;;) {
    std::vector<Pt> next;
    next.reserve(pts.size() * 2);
    bool refined = false;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Pt& a = pts[i];
      const Pt& b = pts[(i + 1) % pts.size()];
      const double tb = i + 1 == pts.size() ? 1.0 : b.t;
      next.push_back(a);
      const double tm = 0.5 * (a.t + tb);
      const Cx mid = eval(q, loop.at(tm));
      if (std::abs(mid - 0.5 * (a.img + b.img)) > tol) {
        next.push_back({tm, mid});
        refined = true;
      }
    }
    pts.swap(next);
    if (!refined) break;
    if (static_cast<int>(pts.size()) > o.max_points)
      throw NotCertifiedError("push-forward resampling exceeded max_points");
  }
  std::vector<Cx> poly;
  poly.reserve(pts.size() + 1);
  for (const Pt& p : pts) poly.push_back(p.img);
  return OrientedLoop::polygon(std::move(poly), ambient, fiber);
}

}  // namespace

OrientedLoop push_forward_loop(const SkewProduct& f, const OrientedLoop& loop, const PushForwardOptions& opts) {
  if (loop.ambient() != Ambient::fiber || !loop.fiber()) throw ValidationError("expected a loop in a vertical fiber");
  const Cx z0 = *loop.fiber();
  return push_impl(f.fiber_map(z0), loop, opts, Ambient::fiber, eval(f.p(), z0));
}

OrientedLoop push_forward_loop(const Poly1& g, const OrientedLoop& loop, const PushForwardOptions& opts) {
  return push_impl(g, loop, opts, loop.ambient(), loop.fiber());
}

// ---------------------------------------------------------------------------
// Lifting

namespace {

double min_separation(const std::vector<Cx>& r) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = i + 1; j < r.size(); ++j) m = std::min(m, std::abs(r[i] - r[j]));
  return m;
}

Cx nearest(const std::vector<Cx>& pts, Cx x) {
  Cx best = pts.front();
  for (const Cx& p : pts)
    if (std::abs(p - x) < std::abs(best - x)) best = p;
  return best;
}

// Newton on q(w) = target from the predictor; false when it does not settle.
bool correct(const Poly1& q, Cx& w, Cx target, double tol) {
  for (int it = 0; it < 12; ++it) {
    auto [val, der] = eval_with_deriv(q, w);
    if (der == Cx{}) return false;
    const Cx step = (val - target) / der;
    w -= step;
    if (std::abs(step) <= tol * std::max(1.0, std::abs(w))) return it < 8;
  }
  return false;
}

LiftBundle lift_impl(const Poly1& q, const OrientedLoop& loop, const LiftOptions& o, Ambient ambient,
                     std::optional<Cx> fiber) {
  const int d = q.degree();
  std::vector<Cx> cvs;
  for (const Cx& c : roots(q.derivative())) cvs.push_back(eval(q, c));
  for (const Cx& cv : cvs)
    if (loop.distance_to(cv) < o.margin)
      throw PerturbationRequiredError("a critical value lies within margin of the loop", cv);

  LiftBundle bundle;
  auto shifted = [&](Cx target) {
    std::vector<Cx> c(q.coeffs());
    c[0] -= target;
    return Poly1(std::move(c));
  };
  if (loop.is_point()) {
    for (const Cx& r : roots(shifted(loop.at(0.0)))) bundle.loops.push_back({OrientedLoop::point(r, ambient, fiber), 1});
    return bundle;
  }

  const std::vector<Cx> verts = loop.flatten(loop.length() * o.relative_step);
  std::vector<Cx> cur = roots(shifted(verts.front()));
  const std::vector<Cx> start = cur;
  double scale = 1.0;
  for (const Cx& r : cur) scale = std::max(scale, std::abs(r));
  std::vector<std::vector<Cx>> tracks(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) tracks[static_cast<std::size_t>(j)].push_back(cur[static_cast<std::size_t>(j)]);

  const double collision = 1e-9 * scale;
  for (std::size_t k = 0; k < verts.size(); ++k) {
    const Cx a = verts[k];
    const Cx b = verts[(k + 1) % verts.size()];
    double s = 0.0, h = 1.0;
    Cx prev_target = a;
    while (s < 1.0) {
      const double s_next = std::min(1.0, s + h);
      const Cx target = a + (b - a) * s_next;
      const double sep = min_separation(cur);
      std::vector<Cx> next(cur);
      bool ok = true;
      for (Cx& w : next) {
        const Cx der = eval_with_deriv(q, w).second;
        if (der == Cx{}) {
          ok = false;
          break;
        }
        const Cx w0 = w;
        w += (target - prev_target) / der;
        if (!correct(q, w, target, o.newton_tol) || std::abs(w - w0) > 0.25 * sep) {
          ok = false;
          break;
        }
      }
      if (ok && min_separation(next) <= collision) ok = false;
      if (!ok) {
        h *= 0.5;
        if (h < 1e-12) throw PerturbationRequiredError("root collision during continuation", nearest(cvs, target));
        continue;
      }
      cur.swap(next);
      s = s_next;
      prev_target = target;
      ++bundle.continuation_steps;
      for (int j = 0; j < d; ++j) {
        tracks[static_cast<std::size_t>(j)].push_back(cur[static_cast<std::size_t>(j)]);
        bundle.max_residual = std::max(bundle.max_residual, std::abs(eval(q, cur[static_cast<std::size_t>(j)]) - target));
      }
      h = std::min(1.0, 2.0 * h);
    }
  }

  // perm[j]: index of the start root where track j ends.
  std::vector<int> perm(static_cast<std::size_t>(d), -1);
  std::vector<bool> taken(static_cast<std::size_t>(d), false);
  for (int j = 0; j < d; ++j) {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (int i = 0; i < d; ++i) {
      const double dist = std::abs(cur[static_cast<std::size_t>(j)] - start[static_cast<std::size_t>(i)]);
      if (dist < bd) {
        bd = dist;
        best = i;
      }
    }
    if (best < 0 || bd > 1e-6 * scale || taken[static_cast<std::size_t>(best)])
      throw NotCertifiedError("continuation did not return to the starting roots");
    taken[static_cast<std::size_t>(best)] = true;
    perm[static_cast<std::size_t>(j)] = best;
  }

  std::vector<bool> seen(static_cast<std::size_t>(d), false);
  for (int j0 = 0; j0 < d; ++j0) {
    if (seen[static_cast<std::size_t>(j0)]) continue;
    std::vector<Cx> pts;
    int k = 0;
    for (int j = j0; !seen[static_cast<std::size_t>(j)]; j = perm[static_cast<std::size_t>(j)]) {
      seen[static_cast<std::size_t>(j)] = true;
      const auto& tr = tracks[static_cast<std::size_t>(j)];
      pts.insert(pts.end(), tr.begin(), tr.end() - 1);
      ++k;
    }
    bundle.loops.push_back({OrientedLoop::polygon(std::move(pts), ambient, fiber), k});
  }
  return bundle;
}

}  // namespace

LiftBundle lift_loop(const SkewProduct& f, Cx z1, const OrientedLoop& loop, const LiftOptions& opts) {
  if (loop.ambient() != Ambient::fiber || !loop.fiber()) throw ValidationError("expected a loop in a vertical fiber");
  const Cx z0 = eval(f.p(), z1);
  check_fiber(loop, z0);
  LiftBundle b = lift_impl(f.fiber_map(z1), loop, opts, Ambient::fiber, z1);
  b.source_fiber = z0;
  b.target_fiber = z1;
  return b;
}

LiftBundle lift_loop(const Poly1& g, const OrientedLoop& loop, const LiftOptions& opts) {
  return lift_impl(g, loop, opts, loop.ambient(), loop.fiber());
}

int count_enclosed_critical_values(const SkewProduct& f, Cx z_next, const OrientedLoop& loop, double margin) {
  if (loop.is_point()) return 0;
  int n = 0;
  for (const Cx& cv : fiber_critical_values(f, z_next)) {
    if (loop.distance_to(cv) < margin)
      throw PerturbationRequiredError("a critical value lies within margin of the loop", cv);
    if (loop.winding_number(cv) != 0) ++n;
  }
  return n;
}

BackwardChooser default_backward_chooser(const Poly1& p) {
  return [p](Cx target) {
    std::vector<Cx> c(p.coeffs());
    c[0] -= target;
    const std::vector<Cx> rs = roots(Poly1(std::move(c)));
    auto arg0 = [](Cx z) {
      const double a = std::arg(z);
      return a < 0.0 ? a + kTwoPi : a;
    };
    Cx best = rs.front();
    for (const Cx& r : rs) {
      const double mr = std::abs(r), mb = std::abs(best);
      const double tol = 1e-12 * std::max(1.0, mb);
      if (mr > mb + tol || (std::abs(mr - mb) <= tol && arg0(r) < arg0(best))) best = r;
    }
    return best;
  };
}

// ---------------------------------------------------------------------------
// Linking sequences

namespace {

struct Admissible {
  OrientedLoop loop;
  int enclosed = 0;
  int retries = 0;
};

// Jitter factors 1 + 1e-6, 1 - 1e-6, 1 + 2e-6, ...
double jitter_factor(int retry, double step) {
  const int k = (retry + 1) / 2;
  return retry % 2 == 1 ? 1.0 + k * step : 1.0 - k * step;
}

// Scale the loop about its centroid until no critical value of the next map
// sits on it and at most d - 2 of them are enclosed.
std::optional<Admissible> make_admissible(const SkewProduct& f, Cx z_next, const OrientedLoop& loop,
                                          const SequenceOptions& o) {
  const Cx c = loop.centroid();
  for (int r = 0; r <= o.max_jitter; ++r) {
    const OrientedLoop cand = r == 0 ? loop : loop.scaled_about(c, jitter_factor(r, o.jitter_step));
    try {
      const int n = count_enclosed_critical_values(f, z_next, cand, o.lift.margin);
      if (n <= f.degree() - 2) return Admissible{cand, n, r};
    } catch (const PerturbationRequiredError&) {
    }
  }
  return std::nullopt;
}

}  // namespace

LinkingSequence generate_linking_sequence(const SkewProduct& f, Cx z0, const OrientedLoop& seed, int steps,
                                          const BackwardChooser& chooser_in, const SequenceOptions& opts) {
  if (steps < 0) throw ValidationError("sequence steps must be >= 0");
  const int d = f.degree();
  const BackwardChooser chooser = chooser_in ? chooser_in : default_backward_chooser(f.p());
  check_fiber(seed, z0);

  LinkingSequence seq;
  const LinkResult first = linking_fiber(f, make_fiber_context(f, z0), seed, opts.linking);
  if (first.lk.is_zero())
    throw ValidationError("seed loop has linking number 0: no separating loop to start a sequence from");

  SequenceStep s0;
  s0.index = 0;
  s0.base_point = z0;
  s0.loop = seed;
  s0.link = first;
  if (steps == 0) {
    seq.steps.push_back(s0);
    return seq;
  }

  Cx z_cur = z0;
  Cx z_next = chooser(z_cur);
  {
    auto adm = make_admissible(f, z_next, seed, opts);
    if (!adm) {
      seq.steps.push_back(s0);
      seq.truncated = true;
      seq.diagnostic = "seed loop could not be made admissible for the first lift";
      return seq;
    }
    if (adm->retries > 0) {
      s0.loop = adm->loop;
      s0.link = linking_fiber(f, make_fiber_context(f, z0), s0.loop, opts.linking);
      if (!(s0.link.pairing == first.pairing)) {
        seq.steps.push_back(s0);
        seq.truncated = true;
        seq.diagnostic = "jittered seed changed its pairing";
        return seq;
      }
    }
    s0.enclosed_next_critical_values = adm->enclosed;
    s0.jitter_retries = adm->retries;
  }
  seq.steps.push_back(s0);
  const Rational p0 = s0.link.pairing;
  Rational bound = p0;
  const Rational ratio(d - 1, d);

  for (int n = 1; n <= steps; ++n) {
    const SequenceStep& prev = seq.steps.back();
    LiftBundle bundle;
    try {
      bundle = lift_loop(f, z_next, prev.loop, opts.lift);
    } catch (const Error& e) {
      seq.truncated = true;
      seq.diagnostic = std::string("lift failed at step ") + std::to_string(n) + ": " + e.what();
      break;
    }
    const Cx z_after = chooser(z_next);
    std::optional<Admissible> chosen;
    int chosen_k = 0;
    for (const LiftedLoop& L : bundle.loops) {
      auto adm = make_admissible(f, z_after, L.loop, opts);
      if (adm) {
        chosen = std::move(adm);
        chosen_k = L.covering_degree;
        break;
      }
    }
    if (!chosen) {
      seq.truncated = true;
      seq.diagnostic = "no admissible lifted loop at step " + std::to_string(n);
      break;
    }
    SequenceStep st;
    st.index = n;
    st.base_point = z_next;
    st.loop = chosen->loop;
    st.covering_degree = chosen_k;
    st.enclosed_next_critical_values = chosen->enclosed;
    st.jitter_retries = chosen->retries;
    try {
      st.link = linking_fiber(f, make_fiber_context(f, z_next), st.loop, opts.linking);
    } catch (const Error& e) {
      seq.truncated = true;
      seq.diagnostic = std::string("linking failed at step ") + std::to_string(n) + ": " + e.what();
      break;
    }
    st.pairing_identity = st.link.pairing == Rational(chosen_k, d) * prev.link.pairing;
    bound = bound * ratio;
    if (st.link.pairing > bound || !st.pairing_identity) seq.contraction_holds = false;
    seq.steps.push_back(std::move(st));
    z_cur = z_next;
    z_next = z_after;
  }
  return seq;
}

}  // namespace greenlinker

#include "greenlinker/skew.hpp"

#include <algorithm>
#include <cmath>

namespace greenlinker {

SkewProduct::SkewProduct(Poly1 p, Poly2W q) : p_(std::move(p)), q_(std::move(q)) {
  const int d = p_.degree();
  if (d < 2) throw ValidationError("skew product degree must be >= 2");
  if (!p_.is_monic()) throw ValidationError("p must be monic");
  if (q_.w_degree() != d) throw ValidationError("q must have w-degree equal to deg p");
  if (!q_.is_monic_in_w()) throw ValidationError("q must be monic in w");
  if (q_.total_degree() > d) throw ValidationError("q must have total degree <= d");
  endo_ = homogenize(*this);
}

PolyEndo2 homogenize(const SkewProduct& f) {
  const int d = f.degree();
  HomogeneousForm3 P(d), Q(d);
  for (int i = 0; i <= d; ++i) P.set(i, 0, f.p().coeff(i));
  for (int j = 0; j <= f.q().w_degree(); ++j) {
    const Poly1& c = f.q().w_coeff(j);
    for (int i = 0; i <= c.degree(); ++i)
      if (c.coeff(i) != Cx{}) Q.set(i, j, c.coeff(i));
  }
  return PolyEndo2(std::move(P), std::move(Q));
}

SkewProduct dehomogenize(const PolyEndo2& endo) {
  const int d = endo.degree();
  std::vector<Cx> pc(static_cast<std::size_t>(d) + 1);
  for (int i = 0; i <= d; ++i)
    for (int j = 0; i + j <= d; ++j) {
      const Cx c = endo.p().coeff(i, j);
      if (j == 0)
        pc[static_cast<std::size_t>(i)] = c;
      else if (c != Cx{})
        throw ValidationError("P depends on W: not a skew product");
    }
  std::vector<Poly1> qc;
  for (int j = 0; j <= d; ++j) {
    std::vector<Cx> zc(static_cast<std::size_t>(d - j) + 1);
    for (int i = 0; i + j <= d; ++i) zc[static_cast<std::size_t>(i)] = endo.q().coeff(i, j);
    qc.emplace_back(std::move(zc));
  }
  return SkewProduct(Poly1(std::move(pc)), Poly2W(std::move(qc)));
}

FiberContext FiberContext::shifted(int n) const {
  if (n < 0 || n > depth()) throw ValidationError("FiberContext::shifted: index outside the stored orbit");
  FiberContext c = *this;
  c.z0 = orbit[static_cast<std::size_t>(n)];
  c.orbit.assign(orbit.begin() + n, orbit.end());
  return c;
}

FiberContext make_fiber_context(const SkewProduct& f, Cx z0, int depth) {
  if (depth < 1) throw ValidationError("fiber context depth must be >= 1");
  if (!is_finite(z0)) throw ValidationError("base point is not finite");
  FiberContext ctx;
  ctx.z0 = z0;
  ctx.orbit.reserve(static_cast<std::size_t>(depth) + 1);
  const double base_radius = escape_radius(f.p());
  Cx z = z0;
  ctx.orbit.push_back(z);
  for (int k = 0; k < depth; ++k) {
    if (std::abs(z) > base_radius) {
      ctx.base_escapes = true;
      break;
    }
    z = eval(f.p(), z);
    ctx.orbit.push_back(z);
  }
  if (std::abs(ctx.orbit.back()) > base_radius) ctx.base_escapes = true;
  for (const Cx& o : ctx.orbit) ctx.z_bound = std::max(ctx.z_bound, std::abs(o));
  ctx.lower_sum = fiber_lower_coeff_bound(f.q(), ctx.z_bound);
  ctx.radius = escape_radius_fiberwise(f.q(), ctx.z_bound);
  return ctx;
}

GreenValue green_affine(const SkewProduct& f, Cx z, Cx w, const GreenOptions& opts) {
  return green_affine(f.endo(), z, w, opts);
}

namespace {

GreenValue green_fiber_fallback(const SkewProduct& f, const FiberContext& ctx, Cx w, const GreenOptions& opts) {
  const GreenValue ga = green_affine(f, ctx.z0, w, opts);
  const GreenValue gp = green_poly(f.p(), ctx.z0, opts);
  GreenValue g;
  g.depth = std::max(ga.depth, gp.depth);
  g.bound.valid = ga.bound.valid && gp.bound.valid;
  g.bound.value = ga.bound.value + gp.bound.value;
  const double diff = ga.value - gp.value;
  g.value = std::max(0.0, diff);
  if (ga.status == GreenStatus::undetermined || gp.status == GreenStatus::undetermined)
    g.status = GreenStatus::undetermined;
  else if (diff > g.bound.value)
    g.status = GreenStatus::escaped;
  else
    g.status = GreenStatus::undetermined;
  return g;
}

}  // namespace

GreenValue green_fiber(const SkewProduct& f, const FiberContext& ctx, Cx w, const GreenOptions& opts) {
  if (!is_finite(w)) throw ValidationError("green_fiber: point is not finite");
  if (ctx.base_escapes) return green_fiber_fallback(f, ctx, w, opts);
  const int d = f.degree();
  const double radius = ctx.radius;
  const double s = ctx.lower_sum;
  const double bounded_const = std::log(radius) + log_ratio_bound(s, radius) / (d - 1);
  const int cap = std::min(opts.fixed_depth ? *opts.fixed_depth : opts.max_depth, ctx.depth());

  auto tail = [&](double r) { return log_ratio_bound(s, r) / (d - 1); };
  Cx x = w;
  double logmod = 0.0;
  bool log_form = false;
  double frozen = 0.0;
  bool escaped = std::abs(w) > radius;
  double weight = 1.0;
  int n = 0;
  auto current_bound = [&]() {
    if (!escaped) return bounded_const * weight;
    if (log_form) return frozen;
    return tail(std::abs(x)) * weight;
  };
  while (n < cap) {
    if (!opts.fixed_depth && current_bound() <= opts.target_err) break;
    if (log_form) {
      logmod *= d;
    } else {
      x = eval(f.fiber_map(ctx.orbit[static_cast<std::size_t>(n)]), x);
      if (!escaped && std::abs(x) > radius) escaped = true;
      if (std::abs(x) > log_form_threshold(d)) {
        log_form = true;
        logmod = std::log(std::abs(x));
        frozen = tail(std::abs(x)) * weight / d;
      }
    }
    weight /= d;
    ++n;
  }
  GreenValue g;
  g.depth = n;
  g.bound.valid = true;
  g.bound.value = current_bound();
  if (escaped) {
    g.value = std::max(0.0, (log_form ? logmod : std::log(std::abs(x))) * weight);
    g.status = GreenStatus::escaped;
  } else {
    g.status = GreenStatus::bounded;
  }
  if (opts.fixed_depth && n < *opts.fixed_depth) g.status = GreenStatus::undetermined;
  if (!opts.fixed_depth && g.bound.value > opts.target_err) g.status = GreenStatus::undetermined;
  return g;
}

LogPoint fiber_iterate_log(const SkewProduct& f, const FiberContext& ctx, Cx w, int n) {
  if (ctx.base_escapes) throw UnsupportedError("fiber iteration needs a bounded base orbit");
  if (n > ctx.depth()) throw ValidationError("fiber_iterate_log: depth exceeds the stored base orbit");
  const int d = f.degree();
  LogPoint lp;
  Cx x = w;
  int k = 0;
  for (; k < n; ++k) {
    if (std::abs(x) > log_form_threshold(d)) break;
    x = eval(f.fiber_map(ctx.orbit[static_cast<std::size_t>(k)]), x);
  }
  const double m = std::abs(x);
  if (m == 0.0) {
    lp.log_modulus = -std::numeric_limits<double>::infinity();
    return lp;
  }
  lp.log_modulus = std::log(m);
  lp.phase = x / m;
  for (; k < n; ++k) {
    lp.overflowed = true;
    lp.log_modulus *= d;
    Cx u = 1.0;
    for (int j = 0; j < d; ++j) u = cmul(u, lp.phase);
    lp.phase = u / std::abs(u);
  }
  return lp;
}

std::vector<Cx> fiber_critical_points(const SkewProduct& f, Cx z) {
  return roots(f.fiber_map(z).derivative());
}

std::vector<Cx> fiber_critical_values(const SkewProduct& f, Cx z) {
  const Poly1 q = f.fiber_map(z);
  std::vector<Cx> out;
  for (const Cx& c : roots(q.derivative())) out.push_back(eval(q, c));
  return out;
}

const char* to_string(ConnectivityVerdict v) noexcept {
  switch (v) {
    case ConnectivityVerdict::disconnected: return "disconnected";
    case ConnectivityVerdict::no_escaping_critical_point: return "no_escaping_critical_point_through_depth";
    case ConnectivityVerdict::undetermined: return "undetermined";
  }
  return "?";
}

ConnectivityCertificate connectivity_certificate(const SkewProduct& f, Cx z0, int depth, const GreenOptions& opts) {
  if (depth < 0) throw ValidationError("connectivity depth must be >= 0");
  const FiberContext ctx = make_fiber_context(f, z0, depth + opts.max_depth + 1);
  ConnectivityCertificate cert;
  cert.depth = depth;
  bool any_undetermined = false;
  const int last = std::min(depth, ctx.depth());
  for (int n = 0; n <= last; ++n) {
    const FiberContext sub = ctx.shifted(n);
    for (const Cx& c : fiber_critical_points(f, sub.z0)) {
      const GreenValue g = green_fiber(f, sub, c, opts);
      if (g.certified_positive()) {
        cert.verdict = ConnectivityVerdict::disconnected;
        cert.witness = ConnectivityCertificate::Witness{n, sub.z0, c, g};
        return cert;
      }
      if (g.status == GreenStatus::undetermined) any_undetermined = true;
    }
  }
  cert.verdict = any_undetermined ? ConnectivityVerdict::undetermined : ConnectivityVerdict::no_escaping_critical_point;
  return cert;
}

const char* to_string(QuadraticClass c) noexcept {
  switch (c) {
    case QuadraticClass::ball_basins: return "ball-basins";
    case QuadraticClass::infinitely_generated_vertical_basin: return "infinitely-generated-vertical-basin";
    case QuadraticClass::undetermined: return "undetermined";
  }
  return "?";
}

QuadraticClassification classify_quadratic_family(Cx a, int max_iter) {
  QuadraticClassification q;
  q.membership = mandelbrot_member(a, max_iter);
  switch (q.membership.verdict) {
    case MandelbrotVerdict::inside: q.cls = QuadraticClass::ball_basins; break;
    case MandelbrotVerdict::outside: q.cls = QuadraticClass::infinitely_generated_vertical_basin; break;
    case MandelbrotVerdict::undetermined: q.cls = QuadraticClass::undetermined; break;
  }
  return q;
}

}  // namespace greenlinker

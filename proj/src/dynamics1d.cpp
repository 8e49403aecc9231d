#include "greenlinker/dynamics1d.hpp"

#include <algorithm>
#include <cmath>

#include "greenlinker/kernels.hpp"

namespace greenlinker {

const char* to_string(GreenStatus s) noexcept {
  switch (s) {
    case GreenStatus::escaped: return "escaped";
    case GreenStatus::bounded: return "bounded";
    case GreenStatus::undetermined: return "undetermined";
  }
  return "?";
}

const char* to_string(CriticalFate f) noexcept {
  switch (f) {
    case CriticalFate::escaping: return "escaping";
    case CriticalFate::attracted: return "attracted";
    case CriticalFate::bounded_undetermined: return "bounded_undetermined";
  }
  return "?";
}

const char* to_string(MandelbrotVerdict v) noexcept {
  switch (v) {
    case MandelbrotVerdict::inside: return "inside";
    case MandelbrotVerdict::outside: return "outside";
    case MandelbrotVerdict::undetermined: return "undetermined";
  }
  return "?";
}

GreenValue green_poly(const Poly1& p, Cx z, const GreenOptions& opts) {
  const int d = p.degree();
  if (d < 2 || !p.is_monic()) throw ValidationError("green_poly needs a monic polynomial of degree >= 2");
  if (!is_finite(z)) throw ValidationError("green_poly: point is not finite");
  const double radius = escape_radius(p);
  const double s = p.lower_coeff_sum();
  const double bounded_const = std::log(radius) + log_ratio_bound(s, radius) / (d - 1);
  const int cap = opts.fixed_depth ? *opts.fixed_depth : opts.max_depth;

  Cx x = z;
  double logmod = 0.0;  // log|x| once in log form
  bool log_form = false;
  double log_form_switch = 0.0;  // d^-k log|x_k| tail constant frozen at the switch
  bool escaped = std::abs(z) > radius;
  double weight = 1.0;  // d^-n
  int n = 0;

  auto tail = [&](double r) { return log_ratio_bound(s, r) / (d - 1); };
  auto current_bound = [&]() {
    if (!escaped) return bounded_const * weight;
    if (log_form) return log_form_switch;
    return tail(std::abs(x)) * weight;
  };

  while (n < cap) {
    if (!opts.fixed_depth && current_bound() <= opts.target_err) break;
    if (log_form) {
      // Past the threshold the lower terms change log|x^d| by less than s/|x|.
      logmod *= d;
    } else {
      x = eval(p, x);
      if (!escaped && std::abs(x) > radius) escaped = true;
      if (std::abs(x) > log_form_threshold(d)) {
        log_form = true;
        logmod = std::log(std::abs(x));
        log_form_switch = tail(std::abs(x)) * weight / d;
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
    g.value = 0.0;
    g.status = GreenStatus::bounded;
  }
  if (!opts.fixed_depth && g.bound.value > opts.target_err) g.status = GreenStatus::undetermined;
  return g;
}

int detect_period(std::span<const Cx> tail, double tol) {
  if (tail.size() < 2) return 0;
  const Cx last = tail.back();
  for (std::size_t k = 1; k < tail.size(); ++k)
    if (std::abs(last - tail[tail.size() - 1 - k]) < tol) return static_cast<int>(k);
  return 0;
}

int CriticalReport::escaping_count() const {
  return static_cast<int>(std::count_if(points.begin(), points.end(), [](const auto& p) { return p.escapes; }));
}

CriticalReport critical_report(const Poly1& p, int max_iter) {
  if (p.degree() < 2) throw ValidationError("critical_report needs degree >= 2");
  if (max_iter < 4) throw ValidationError("critical_report needs max_iter >= 4");
  const double radius = escape_radius(p);
  const int tail_len = max_iter / 4 + 1;
  CriticalReport rep;
  rep.max_iter = max_iter;
  for (const Cx& c : roots(p.derivative())) {
    CriticalPointReport r;
    r.point = c;
    std::vector<Cx> tail;
    tail.reserve(static_cast<std::size_t>(tail_len));
    Cx x = c;
    bool left = std::abs(x) > radius;
    for (int k = 1; k <= max_iter && !left; ++k) {
      x = eval(p, x);
      if (std::abs(x) > radius) left = true;
      if (k > max_iter - tail_len) tail.push_back(x);
    }
    r.green = green_poly(p, c);
    r.escapes = left && r.green.certified_positive();
    if (r.escapes) {
      r.fate = CriticalFate::escaping;
    } else if (!left) {
      r.period = detect_period(tail);
      r.fate = r.period > 0 ? CriticalFate::attracted : CriticalFate::bounded_undetermined;
    }
    rep.points.push_back(r);
  }
  return rep;
}

MandelbrotResult mandelbrot_member(Cx a, int max_iter) {
  if (max_iter < 4) throw ValidationError("mandelbrot_member needs max_iter >= 4");
  if (!is_finite(a)) throw ValidationError("mandelbrot_member: parameter is not finite");
  const int tail_len = max_iter / 4 + 1;
  std::vector<Cx> tail(static_cast<std::size_t>(tail_len));
  int esc = -1;
  kernels::quadratic_orbits({&a, 1}, max_iter, tail_len, {&esc, 1}, tail, kernels::Isa::scalar);
  MandelbrotResult r;
  if (esc >= 0) {
    r.verdict = MandelbrotVerdict::outside;
    r.escape_depth = esc;
  } else {
    r.period = detect_period(tail);
    r.verdict = r.period > 0 ? MandelbrotVerdict::inside : MandelbrotVerdict::undetermined;
  }
  return r;
}

namespace {

bool is_pure_power(const HomogeneousForm2& f, int index, double tol) {
  const double lead = std::abs(f.coeff(index));
  if (lead == 0.0) return false;
  for (int i = 0; i <= f.degree(); ++i)
    if (i != index && std::abs(f.coeff(i)) > tol * lead) return false;
  return true;
}

}  // namespace

RestrictionAtInfinity restriction_at_infinity(const PolyEndo2& endo) {
  RestrictionAtInfinity r;
  r.p0 = endo.p().at_infinity();
  r.q0 = endo.q().at_infinity();
  if (binary_forms_share_root(r.p0, r.q0))
    throw ValidationError("P(Z,W,0) and Q(Z,W,0) share a root: not an endomorphism of P^2");
  const int d = endo.degree();
  Poly1 poly;
  Cx lambda;
  if (is_pure_power(r.q0, 0, 0.0)) {
    // Q0 = lambda W^d: zeta = Z/W, f(zeta) = P0(zeta, 1) / lambda.
    r.chart = RestrictionAtInfinity::Chart::z_over_w;
    lambda = r.q0.coeff(0);
    poly = r.p0.dehomogenize_w();
  } else if (is_pure_power(r.p0, d, 0.0)) {
    // P0 = lambda Z^d: xi = W/Z, f(xi) = Q0(1, xi) / lambda.
    r.chart = RestrictionAtInfinity::Chart::w_over_z;
    lambda = r.p0.coeff(d);
    poly = r.q0.dehomogenize_z();
  } else {
    return r;
  }
  poly = poly.scaled(1.0 / lambda);
  if (poly.degree() != d) return r;
  // Conjugate by zeta = beta * xi so the result is monic.
  const Cx lead = poly.leading();
  const Cx beta = lead == Cx(1.0) ? Cx(1.0) : std::pow(1.0 / lead, 1.0 / (d - 1));
  if (beta != Cx(1.0)) {
    std::vector<Cx> c(poly.coeffs());
    Cx bk = 1.0;
    for (auto& ck : c) {
      ck = cmul(ck, bk) / beta;
      bk = cmul(bk, beta);
    }
    c.back() = 1.0;
    poly = Poly1(std::move(c));
  }
  r.is_polynomial = true;
  r.polynomial = std::move(poly);
  r.chart_scale = beta;
  return r;
}

}  // namespace greenlinker

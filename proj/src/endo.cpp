#include "greenlinker/endo.hpp"

#include <algorithm>
#include <cmath>

#include "greenlinker/dynamics1d.hpp"

namespace greenlinker {

// ---------------------------------------------------------------------------
// Binary forms

HomogeneousForm2::HomogeneousForm2(int degree, std::vector<Cx> z_power_coeffs)
    : degree_(degree), coeffs_(std::move(z_power_coeffs)) {
  if (degree < 0) throw ValidationError("binary form degree must be >= 0");
  if (coeffs_.size() > static_cast<std::size_t>(degree) + 1)
    throw ValidationError("binary form has more coefficients than degree + 1");
  coeffs_.resize(static_cast<std::size_t>(degree) + 1, Cx{});
}

Cx HomogeneousForm2::coeff(int i) const noexcept {
  return i >= 0 && i <= degree_ ? coeffs_[static_cast<std::size_t>(i)] : Cx{};
}

Cx HomogeneousForm2::eval(Cx z, Cx w) const {
  Cx acc{};
  Cx zp = 1.0;
  std::vector<Cx> wp(static_cast<std::size_t>(degree_) + 1, Cx(1.0));
  for (int k = 1; k <= degree_; ++k) wp[static_cast<std::size_t>(k)] = cmul(wp[static_cast<std::size_t>(k) - 1], w);
  for (int i = 0; i <= degree_; ++i) {
    acc += cmul(cmul(coeffs_[static_cast<std::size_t>(i)], zp), wp[static_cast<std::size_t>(degree_ - i)]);
    zp = cmul(zp, z);
  }
  return acc;
}

Poly1 HomogeneousForm2::dehomogenize_w() const { return Poly1(coeffs_); }

Poly1 HomogeneousForm2::dehomogenize_z() const {
  std::vector<Cx> c(coeffs_.rbegin(), coeffs_.rend());
  return Poly1(std::move(c));
}

// ---------------------------------------------------------------------------
// Ternary forms

HomogeneousForm3::HomogeneousForm3(int degree)
    : degree_(degree), coeffs_(static_cast<std::size_t>((degree + 1) * (degree + 1)), Cx{}) {
  if (degree < 1) throw ValidationError("ternary form degree must be >= 1");
}

std::size_t HomogeneousForm3::index(int i, int j) const {
  if (i < 0 || j < 0 || i + j > degree_) throw ValidationError("monomial index outside the form's degree");
  return static_cast<std::size_t>(i * (degree_ + 1) + j);
}

Cx HomogeneousForm3::coeff(int i, int j) const { return coeffs_[index(i, j)]; }
void HomogeneousForm3::set(int i, int j, Cx c) { coeffs_[index(i, j)] = c; }
void HomogeneousForm3::add(int i, int j, Cx c) { coeffs_[index(i, j)] += c; }

Cx HomogeneousForm3::eval(Cx z, Cx w, Cx t) const {
  const auto n = static_cast<std::size_t>(degree_) + 1;
  std::vector<Cx> zp(n, Cx(1.0)), wp(n, Cx(1.0)), tp(n, Cx(1.0));
  for (std::size_t k = 1; k < n; ++k) {
    zp[k] = cmul(zp[k - 1], z);
    wp[k] = cmul(wp[k - 1], w);
    tp[k] = cmul(tp[k - 1], t);
  }
  Cx acc{};
  for (int i = 0; i <= degree_; ++i)
    for (int j = 0; i + j <= degree_; ++j) {
      const Cx c = coeffs_[index(i, j)];
      if (c == Cx{}) continue;
      acc += cmul(cmul(c, zp[static_cast<std::size_t>(i)]),
                  cmul(wp[static_cast<std::size_t>(j)], tp[static_cast<std::size_t>(degree_ - i - j)]));
    }
  return acc;
}

HomogeneousForm2 HomogeneousForm3::at_infinity() const {
  std::vector<Cx> c(static_cast<std::size_t>(degree_) + 1);
  for (int i = 0; i <= degree_; ++i) c[static_cast<std::size_t>(i)] = coeff(i, degree_ - i);
  return HomogeneousForm2(degree_, std::move(c));
}

HomogeneousForm3 HomogeneousForm3::swap_z_t() const {
  HomogeneousForm3 out(degree_);
  for (int i = 0; i <= degree_; ++i)
    for (int j = 0; i + j <= degree_; ++j) out.set(degree_ - i - j, j, coeff(i, j));
  return out;
}

double HomogeneousForm3::t_divisible_coeff_sum() const {
  double s = 0.0;
  for (int i = 0; i <= degree_; ++i)
    for (int j = 0; i + j < degree_; ++j) s += std::abs(coeff(i, j));
  return s;
}

double HomogeneousForm3::coeff_sum() const {
  double s = 0.0;
  for (const Cx& c : coeffs_) s += std::abs(c);
  return s;
}

// ---------------------------------------------------------------------------
// Nondegeneracy

namespace {

double lipschitz_on_disc(const Poly1& p, double radius) {
  double l = 0.0;
  double rk = 1.0;
  for (int k = 1; k <= p.degree(); ++k) {
    l += k * std::abs(p.coeff(k)) * rk;
    rk *= radius;
  }
  return l;
}

double chart_lower_bound(const Poly1& a, const Poly1& b, int grid) {
  const double h = 2.0 / grid;
  const double reach = h / std::sqrt(2.0);
  const double lip = std::max(lipschitz_on_disc(a, 1.0 + h), lipschitz_on_disc(b, 1.0 + h));
  double best = std::numeric_limits<double>::infinity();
  for (int iy = 0; iy <= grid; ++iy)
    for (int ix = 0; ix <= grid; ++ix) {
      const Cx u(-1.0 + ix * h, -1.0 + iy * h);
      if (std::abs(u) > 1.0 + reach) continue;
      best = std::min(best, std::max(std::abs(eval(a, u)), std::abs(eval(b, u))));
    }
  return best - lip * reach;
}

}  // namespace

double binary_forms_lower_bound(const HomogeneousForm2& a, const HomogeneousForm2& b, int grid) {
  return std::min(chart_lower_bound(a.dehomogenize_w(), b.dehomogenize_w(), grid),
                  chart_lower_bound(a.dehomogenize_z(), b.dehomogenize_z(), grid));
}

bool binary_forms_share_root(const HomogeneousForm2& a, const HomogeneousForm2& b, double tol) {
  const int d = a.degree();
  // Root at [1:0] (W divides both) shows up as vanishing Z^d coefficients.
  const double scale_a = std::max(1e-300, a.dehomogenize_w().lower_coeff_sum() + std::abs(a.coeff(d)));
  const double scale_b = std::max(1e-300, b.dehomogenize_w().lower_coeff_sum() + std::abs(b.coeff(d)));
  const bool a_inf = std::abs(a.coeff(d)) <= tol * scale_a;
  const bool b_inf = std::abs(b.coeff(d)) <= tol * scale_b;
  if (a_inf && b_inf) return true;
  // Use the form whose Z^d coefficient is nonzero to enumerate affine roots.
  const HomogeneousForm2& src = a_inf ? b : a;
  const HomogeneousForm2& other = a_inf ? a : b;
  const double other_scale = a_inf ? scale_a : scale_b;
  const Poly1 sp = src.dehomogenize_w();
  if (sp.degree() < 1) return false;
  for (const Cx& r : roots(sp)) {
    const double mag = std::max(1.0, std::abs(r));
    const double scaled = std::abs(other.eval(r / mag, 1.0 / mag));
    if (scaled <= tol * other_scale * 1e3) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// PolyEndo2

PolyEndo2::PolyEndo2(HomogeneousForm3 p, HomogeneousForm3 q) : p_(std::move(p)), q_(std::move(q)) {
  const int d = p_.degree();
  if (d < 2) throw ValidationError("endomorphism degree must be >= 2");
  if (q_.degree() != d) throw ValidationError("P and Q must have the same degree");
  const HomogeneousForm2 p0 = p_.at_infinity();
  const HomogeneousForm2 q0 = q_.at_infinity();
  if (binary_forms_share_root(p0, q0))
    throw ValidationError("P(Z,W,0) and Q(Z,W,0) share a root: not an endomorphism of P^2");

  double m0 = -1.0;
  for (int grid = 160; grid <= 1280 && m0 <= 0.0; grid *= 2) m0 = binary_forms_lower_bound(p0, q0, grid);
  if (m0 <= 0.0)
    throw ValidationError("could not certify nondegeneracy of the restriction to the line at infinity");

  const double st = std::max(p_.t_divisible_coeff_sum(), q_.t_divisible_coeff_sum());
  double lower = 0.0;
  for (int k = 1; k <= 2000; ++k) {
    const double rho = k / 2000.0;
    lower = std::max(lower, std::min(std::pow(rho, d), m0 - st * rho));
  }
  if (lower <= 0.0) throw ValidationError("could not bound the endomorphism away from zero");
  bounds_.lower_log = -std::log(lower);
  bounds_.upper_log = std::log(std::max({p_.coeff_sum(), q_.coeff_sum(), 1.0}));
  bounds_.step_log = std::max(bounds_.lower_log, bounds_.upper_log);
  bounds_.affine_radius = std::max(1.0, std::pow(2.0 * std::exp(bounds_.lower_log), 1.0 / (d - 1)));
}

std::array<Cx, 3> PolyEndo2::apply(const std::array<Cx, 3>& x) const {
  Cx td = 1.0;
  for (int k = 0; k < degree(); ++k) td = cmul(td, x[2]);
  return {p_.eval(x[0], x[1], x[2]), q_.eval(x[0], x[1], x[2]), td};
}

std::pair<Cx, Cx> PolyEndo2::apply_affine(Cx z, Cx w) const {
  return {p_.eval(z, w, 1.0), q_.eval(z, w, 1.0)};
}

// ---------------------------------------------------------------------------
// Affine Green function

namespace {

double sup_norm(const std::array<Cx, 3>& x) {
  return std::max({std::abs(x[0]), std::abs(x[1]), std::abs(x[2])});
}

}  // namespace

GreenValue green_affine(const PolyEndo2& f, Cx z, Cx w, const GreenOptions& opts) {
  if (!is_finite(z) || !is_finite(w)) throw ValidationError("green_affine: point is not finite");
  const int d = f.degree();
  const EndoBounds& b = f.bounds();
  const double tail_const = b.step_log / (d - 1);
  const double bounded_const = std::log(b.affine_radius) + tail_const;

  int depth = 0;
  if (opts.fixed_depth) {
    depth = *opts.fixed_depth;
  } else {
    double scale = std::max(tail_const, bounded_const);
    while (depth < opts.max_depth && scale > opts.target_err) {
      scale /= d;
      ++depth;
    }
  }

  std::array<Cx, 3> x{z, w, Cx(1.0)};
  double norm = sup_norm(x);
  double acc = std::log(norm);
  for (Cx& c : x) c /= norm;
  bool escaped = std::max(std::abs(z), std::abs(w)) > b.affine_radius;
  double weight = 1.0;
  for (int k = 0; k < depth; ++k) {
    x = f.apply(x);
    norm = sup_norm(x);
    weight /= d;
    acc += weight * std::log(norm);
    for (Cx& c : x) c /= norm;
    if (!escaped && std::max(std::abs(x[0]), std::abs(x[1])) > b.affine_radius * std::abs(x[2])) escaped = true;
  }

  GreenValue g;
  g.depth = depth;
  g.bound.valid = true;
  if (escaped) {
    g.value = std::max(0.0, acc);
    g.bound.value = tail_const * weight;
    g.status = GreenStatus::escaped;
  } else {
    g.value = 0.0;
    g.bound.value = bounded_const * weight;
    g.status = GreenStatus::bounded;
  }
  if (g.bound.value > opts.target_err && !opts.fixed_depth) g.status = GreenStatus::undetermined;
  return g;
}

}  // namespace greenlinker

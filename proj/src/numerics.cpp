#include "greenlinker/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace greenlinker {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::overflow: return "overflow";
    case ErrorKind::non_convergence: return "non_convergence";
    case ErrorKind::not_certified: return "not_certified";
    case ErrorKind::perturbation_required: return "perturbation_required";
    case ErrorKind::julia_intersection: return "julia_intersection";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::internal: return "internal";
  }
  return "unknown";
}

bool is_finite(Cx a) noexcept { return std::isfinite(a.real()) && std::isfinite(a.imag()); }

// ---------------------------------------------------------------------------
// Poly1

Poly1::Poly1(std::vector<Cx> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.push_back(Cx{});
  for (const Cx& c : coeffs_) {
    if (!is_finite(c)) throw ValidationError("polynomial coefficient is not finite");
  }
  while (coeffs_.size() > 1 && coeffs_.back() == Cx{}) coeffs_.pop_back();
}

Poly1 Poly1::monomial(int degree, Cx coeff) {
  std::vector<Cx> c(static_cast<std::size_t>(degree) + 1, Cx{});
  c.back() = coeff;
  return Poly1(std::move(c));
}

double Poly1::lower_coeff_sum() const noexcept {
  double s = 0.0;
  for (int k = 0; k < degree(); ++k) s += std::abs(coeffs_[static_cast<std::size_t>(k)]);
  return s;
}

Poly1 Poly1::derivative() const {
  if (degree() == 0) return Poly1{};
  std::vector<Cx> d(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = coeffs_[k] * static_cast<double>(k);
  return Poly1(std::move(d));
}

Poly1 Poly1::operator+(const Poly1& other) const {
  std::vector<Cx> c(std::max(coeffs_.size(), other.coeffs_.size()), Cx{});
  for (std::size_t k = 0; k < coeffs_.size(); ++k) c[k] += coeffs_[k];
  for (std::size_t k = 0; k < other.coeffs_.size(); ++k) c[k] += other.coeffs_[k];
  return Poly1(std::move(c));
}

Poly1 Poly1::operator-(const Poly1& other) const { return *this + other.scaled(-1.0); }

Poly1 Poly1::operator*(const Poly1& other) const {
  std::vector<Cx> c(coeffs_.size() + other.coeffs_.size() - 1, Cx{});
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    for (std::size_t j = 0; j < other.coeffs_.size(); ++j) c[i + j] += coeffs_[i] * other.coeffs_[j];
  return Poly1(std::move(c));
}

Poly1 Poly1::scaled(Cx s) const {
  std::vector<Cx> c = coeffs_;
  for (Cx& x : c) x *= s;
  return Poly1(std::move(c));
}

Poly1 Poly1::compose(const Poly1& inner) const {
  Poly1 acc = Poly1::constant(leading());
  for (int k = degree() - 1; k >= 0; --k) acc = acc * inner + Poly1::constant(coeff(k));
  return acc;
}

// ---------------------------------------------------------------------------
// Poly2W

Poly2W::Poly2W(std::vector<Poly1> w_coeffs) : w_coeffs_(std::move(w_coeffs)) {
  if (w_coeffs_.empty()) w_coeffs_.emplace_back();
  while (w_coeffs_.size() > 1 && w_coeffs_.back() == Poly1{}) w_coeffs_.pop_back();
}

bool Poly2W::is_monic_in_w() const noexcept {
  const Poly1& top = w_coeffs_.back();
  return top.degree() == 0 && top.coeff(0) == Cx(1.0);
}

int Poly2W::total_degree() const noexcept {
  int best = 0;
  for (int j = 0; j <= w_degree(); ++j) {
    const Poly1& c = w_coeffs_[static_cast<std::size_t>(j)];
    for (int i = 0; i <= c.degree(); ++i)
      if (c.coeff(i) != Cx{}) best = std::max(best, i + j);
  }
  return best;
}

Poly1 Poly2W::fiber(Cx z) const {
  std::vector<Cx> c(w_coeffs_.size());
  for (std::size_t j = 0; j < w_coeffs_.size(); ++j) c[j] = greenlinker::eval(w_coeffs_[j], z);
  return Poly1(std::move(c));
}

Poly2W Poly2W::w_derivative() const {
  if (w_degree() == 0) return Poly2W{};
  std::vector<Poly1> d;
  for (int j = 1; j <= w_degree(); ++j) d.push_back(w_coeffs_[static_cast<std::size_t>(j)].scaled(j));
  return Poly2W(std::move(d));
}

Cx Poly2W::eval(Cx z, Cx w) const { return greenlinker::eval(fiber(z), w); }

// ---------------------------------------------------------------------------
// Evaluation

Cx eval(const Poly1& poly, Cx x) {
  const auto& c = poly.coeffs();
  Cx acc = c.back();
  for (int k = poly.degree() - 1; k >= 0; --k) acc = cmul(acc, x) + c[static_cast<std::size_t>(k)];
  if (!is_finite(acc)) throw OverflowError("polynomial evaluation overflowed");
  return acc;
}

std::pair<Cx, Cx> eval_with_deriv(const Poly1& poly, Cx x) {
  const auto& c = poly.coeffs();
  Cx value = c.back();
  Cx deriv{};
  for (int k = poly.degree() - 1; k >= 0; --k) {
    deriv = cmul(deriv, x) + value;
    value = cmul(value, x) + c[static_cast<std::size_t>(k)];
  }
  if (!is_finite(value) || !is_finite(deriv)) throw OverflowError("polynomial evaluation overflowed");
  return {value, deriv};
}

// ---------------------------------------------------------------------------
// Roots

namespace {

double evaluation_scale(const Poly1& poly, Cx x) {
  const double r = std::max(1.0, std::abs(x));
  double scale = 0.0;
  double rk = 1.0;
  for (const Cx& c : poly.coeffs()) {
    scale += std::abs(c) * rk;
    rk *= r;
  }
  return scale;
}

bool residual_ok(const Poly1& poly, Cx r, double tol) {
  return std::abs(eval(poly, r)) <= tol * evaluation_scale(poly, r);
}

std::vector<Cx> low_degree_roots(const Poly1& p) {
  if (p.degree() == 1) return {-p.coeff(0) / p.coeff(1)};
  const Cx a = p.coeff(2), b = p.coeff(1), c = p.coeff(0);
  Cx s = std::sqrt(b * b - 4.0 * a * c);
  if ((std::conj(b) * s).real() < 0.0) s = -s;
  const Cx q = -0.5 * (b + s);
  if (q == Cx{}) return {Cx{}, Cx{}};
  return {q / a, c / q};
}

void newton_polish(const Poly1& p, Cx& r) {
  for (int it = 0; it < 3; ++it) {
    auto [v, dv] = eval_with_deriv(p, r);
    if (dv == Cx{} || v == Cx{}) return;
    const Cx next = r - v / dv;
    if (!is_finite(next) || std::abs(eval(p, next)) >= std::abs(v)) return;
    r = next;
  }
}

std::vector<Cx> aberth(const Poly1& p, const RootOptions& opts) {
  const int d = p.degree();
  const Cx lead = p.leading();
  // Fujiwara-type bound on root modulus.
  double bound = 0.0;
  for (int k = 0; k < d; ++k) {
    const double ratio = std::abs(p.coeff(k) / lead);
    if (ratio > 0.0) bound = std::max(bound, 2.0 * std::pow(ratio, 1.0 / (d - k)));
  }
  bound = std::max(bound, 1e-3);
  const Cx centre = -p.coeff(d - 1) / (lead * static_cast<double>(d));
  const double radius = std::max(0.5 * bound, std::abs(centre) * 1e-3 + 1e-6);

  std::vector<Cx> z(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / d + 0.4;
    z[static_cast<std::size_t>(k)] = centre + std::polar(radius, angle);
  }

  const double eps = std::numeric_limits<double>::epsilon();
  for (int round = 0; round < opts.max_rounds; ++round) {
    bool converged = true;
    for (int k = 0; k < d; ++k) {
      Cx& zk = z[static_cast<std::size_t>(k)];
      auto [v, dv] = eval_with_deriv(p, zk);
      if (v == Cx{}) continue;
      const Cx newton = dv == Cx{} ? Cx(1e-3 * radius) : v / dv;
      Cx repulsion{};
      for (int j = 0; j < d; ++j) {
        if (j == k) continue;
        const Cx diff = zk - z[static_cast<std::size_t>(j)];
        if (diff != Cx{}) repulsion += 1.0 / diff;
      }
      Cx step = newton / (1.0 - newton * repulsion);
      if (!is_finite(step)) step = newton;
      zk -= step;
      if (std::abs(step) > 8.0 * eps * std::max(1.0, std::abs(zk))) converged = false;
    }
    if (converged) break;
  }
  for (Cx& r : z) newton_polish(p, r);
  return z;
}

}  // namespace

std::vector<Cx> roots(const Poly1& poly, const RootOptions& opts) {
  if (poly.degree() < 1) throw ValidationError("roots: polynomial degree must be >= 1");
  std::vector<Cx> out;
  // Exact zero roots from vanishing low coefficients.
  int zeros = 0;
  while (poly.coeff(zeros) == Cx{}) ++zeros;
  out.assign(static_cast<std::size_t>(zeros), Cx{});
  if (zeros == poly.degree()) return out;
  Poly1 rest(std::vector<Cx>(poly.coeffs().begin() + zeros, poly.coeffs().end()));

  std::vector<Cx> found = rest.degree() <= 2 ? low_degree_roots(rest) : aberth(rest, opts);
  for (const Cx& r : found) {
    if (!is_finite(r) || !residual_ok(rest, r, opts.tol)) {
      throw NonConvergenceError("roots: simultaneous iteration did not certify all residuals", found);
    }
  }
  out.insert(out.end(), found.begin(), found.end());
  return out;
}

double escape_radius(const Poly1& poly) {
  if (!poly.is_monic()) throw ValidationError("escape_radius: polynomial must be monic");
  return std::max(2.0, 2.0 * (1.0 + poly.lower_coeff_sum()));
}

double fiber_lower_coeff_bound(const Poly2W& q, double z_bound) {
  double s = 0.0;
  for (int j = 0; j < q.w_degree(); ++j) {
    const Poly1& c = q.w_coeff(j);
    double zk = 1.0;
    for (int i = 0; i <= c.degree(); ++i) {
      s += std::abs(c.coeff(i)) * zk;
      zk *= z_bound;
    }
  }
  return s;
}

double escape_radius_fiberwise(const Poly2W& q, double z_bound) {
  if (!q.is_monic_in_w()) throw ValidationError("escape_radius_fiberwise: q must be monic in w");
  return std::max(2.0, 2.0 * (1.0 + fiber_lower_coeff_bound(q, z_bound)));
}

double log_ratio_bound(double lower_sum, double r) {
  if (lower_sum == 0.0) return 0.0;
  return -std::log1p(-lower_sum / r);
}

}  // namespace greenlinker

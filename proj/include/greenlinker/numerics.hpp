#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "greenlinker/error.hpp"

namespace greenlinker {

using Cx = std::complex<double>;

/// Orbit coordinates above this modulus are carried in log form.
inline constexpr double kLogFormThreshold = 1e150;

/// Largest modulus at which a degree-d step cannot overflow a double.
inline double log_form_threshold(int degree) {
  return degree <= 2 ? kLogFormThreshold : std::pow(1e300, 1.0 / degree);
}

/// Product written out so every kernel performs the same IEEE operations.
inline Cx cmul(Cx a, Cx b) noexcept {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

inline double abs2(Cx a) noexcept { return a.real() * a.real() + a.imag() * a.imag(); }

bool is_finite(Cx a) noexcept;

/// One-variable polynomial, coefficients in ascending degree.
class Poly1 {
public:
  Poly1() = default;
  explicit Poly1(std::vector<Cx> coeffs);

  static Poly1 monomial(int degree, Cx coeff = 1.0);
  static Poly1 constant(Cx c) { return Poly1({c}); }

  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<Cx>& coeffs() const noexcept { return coeffs_; }
  Cx coeff(int k) const noexcept {
    return k >= 0 && k <= degree() ? coeffs_[static_cast<std::size_t>(k)] : Cx{};
  }
  Cx leading() const noexcept { return coeffs_.back(); }
  bool is_monic() const noexcept { return leading() == Cx(1.0); }

  /// Sum of moduli of all coefficients below the leading one.
  double lower_coeff_sum() const noexcept;

  Poly1 derivative() const;
  Poly1 operator+(const Poly1& other) const;
  Poly1 operator-(const Poly1& other) const;
  Poly1 operator*(const Poly1& other) const;
  Poly1 scaled(Cx s) const;
  Poly1 compose(const Poly1& inner) const;

  bool operator==(const Poly1& other) const = default;

private:
  std::vector<Cx> coeffs_{Cx{}};
};

/// q(z, w) = sum_j c_j(z) w^j. The w^d coefficient of a normalized fiber map
/// is the constant polynomial 1.
class Poly2W {
public:
  Poly2W() = default;
  explicit Poly2W(std::vector<Poly1> w_coeffs);

  int w_degree() const noexcept { return static_cast<int>(w_coeffs_.size()) - 1; }
  const std::vector<Poly1>& w_coeffs() const noexcept { return w_coeffs_; }
  const Poly1& w_coeff(int j) const { return w_coeffs_.at(static_cast<std::size_t>(j)); }
  bool is_monic_in_w() const noexcept;
  /// Largest i + j over nonzero coefficients of z^i w^j.
  int total_degree() const noexcept;

  /// The fiber map q_z(w) as a one-variable polynomial in w.
  Poly1 fiber(Cx z) const;
  /// dq/dw as a two-variable polynomial.
  Poly2W w_derivative() const;
  Cx eval(Cx z, Cx w) const;

  bool operator==(const Poly2W& other) const = default;

private:
  std::vector<Poly1> w_coeffs_{Poly1{}};
};

struct ErrBound {
  double value = 0.0;
  bool valid = false;
};

/// Horner evaluation. Throws OverflowError when the result is not finite.
Cx eval(const Poly1& poly, Cx x);
std::pair<Cx, Cx> eval_with_deriv(const Poly1& poly, Cx x);

struct RootOptions {
  double tol = 1e-12;
  int max_rounds = 500;
};

/// All complex roots with multiplicity (Aberth-Ehrlich simultaneous
/// iteration; closed form for degree <= 2). Each returned root satisfies
/// |poly(r)| <= tol * max|coeff| or NonConvergenceError is thrown.
std::vector<Cx> roots(const Poly1& poly, const RootOptions& opts = {});

/// R = max(2, 2(1 + sum of lower coefficient moduli)) for a monic polynomial.
/// |x| > R implies |p(x)| >= 2|x| and |p(x)| >= |x|^d / 2.
double escape_radius(const Poly1& poly);

/// Sup over |z| <= z_bound of the lower-coefficient sum of q_z.
double fiber_lower_coeff_bound(const Poly2W& q, double z_bound);

/// Escape radius valid for every fiber map q_z with |z| <= z_bound.
double escape_radius_fiberwise(const Poly2W& q, double z_bound);

/// -log(1 - s/r): bound on |log(|p(x)| / |x|^d)| for |x| >= r > 2s.
double log_ratio_bound(double lower_sum, double r);

}  // namespace greenlinker

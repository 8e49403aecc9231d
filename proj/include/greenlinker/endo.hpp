#pragma once

#include <array>
#include <vector>

#include "greenlinker/numerics.hpp"

namespace greenlinker {

struct GreenValue;
struct GreenOptions;

/// Binary form sum_i c_i Z^i W^(d-i).
class HomogeneousForm2 {
public:
  HomogeneousForm2() = default;
  HomogeneousForm2(int degree, std::vector<Cx> z_power_coeffs);

  int degree() const noexcept { return degree_; }
  /// Coefficient of Z^i W^(d-i).
  Cx coeff(int i) const noexcept;
  Cx eval(Cx z, Cx w) const;
  /// c(zeta) = F(zeta, 1), ascending in zeta.
  Poly1 dehomogenize_w() const;
  /// c(xi) = F(1, xi), ascending in xi.
  Poly1 dehomogenize_z() const;
  bool operator==(const HomogeneousForm2&) const = default;

private:
  int degree_ = 0;
  std::vector<Cx> coeffs_{Cx{}};
};

/// Ternary form in (Z, W, T): coefficient of Z^i W^j T^(d-i-j) for i + j <= d.
class HomogeneousForm3 {
public:
  HomogeneousForm3() = default;
  explicit HomogeneousForm3(int degree);

  int degree() const noexcept { return degree_; }
  Cx coeff(int i, int j) const;
  void set(int i, int j, Cx c);
  void add(int i, int j, Cx c);

  Cx eval(Cx z, Cx w, Cx t) const;
  /// F(Z, W, 0).
  HomogeneousForm2 at_infinity() const;
  /// F(T, W, Z): exchanges the roles of Z and T.
  HomogeneousForm3 swap_z_t() const;
  /// Sum of |c| over monomials divisible by T.
  double t_divisible_coeff_sum() const;
  double coeff_sum() const;

  bool operator==(const HomogeneousForm3&) const = default;

private:
  std::size_t index(int i, int j) const;
  int degree_ = 0;
  std::vector<Cx> coeffs_;
};

/// Certified constants for the normalized projective iteration of an
/// endomorphism: for every X with ||X||_inf = 1,
///   exp(-lower_log) <= ||F(X)||_inf <= exp(upper_log).
struct EndoBounds {
  double lower_log = 0.0;
  double upper_log = 0.0;
  /// max(lower_log, upper_log): per-step bound on log||F(X)|| - d log||X||.
  double step_log = 0.0;
  /// Sup-norm radius beyond which affine orbits escape (||f(x)|| >= 2||x||).
  double affine_radius = 1.0;
};

/// Polynomial endomorphism f([Z:W:T]) = [P(Z,W,T) : Q(Z,W,T) : T^d] of P^2.
class PolyEndo2 {
public:
  PolyEndo2() = default;
  /// Validates homogeneity and the absence of common zeros off the origin
  /// (P0 and Q0 share no root on the line at infinity).
  PolyEndo2(HomogeneousForm3 p, HomogeneousForm3 q);

  int degree() const noexcept { return p_.degree(); }
  const HomogeneousForm3& p() const noexcept { return p_; }
  const HomogeneousForm3& q() const noexcept { return q_; }
  const EndoBounds& bounds() const noexcept { return bounds_; }

  std::array<Cx, 3> apply(const std::array<Cx, 3>& x) const;
  /// Affine chart T = 1.
  std::pair<Cx, Cx> apply_affine(Cx z, Cx w) const;

  bool operator==(const PolyEndo2& o) const { return p_ == o.p_ && q_ == o.q_; }

private:
  HomogeneousForm3 p_;
  HomogeneousForm3 q_;
  EndoBounds bounds_;
};

/// Certified lower bound for min over the unit sup-sphere of max(|P0|, |Q0|).
/// Non-positive when the forms share a root (or nearly do).
double binary_forms_lower_bound(const HomogeneousForm2& a, const HomogeneousForm2& b, int grid = 160);

/// True when the binary forms have a common projective root, within tol
/// relative to coefficient scale.
bool binary_forms_share_root(const HomogeneousForm2& a, const HomogeneousForm2& b, double tol = 1e-9);

/// Affine Green function lim d^-n log+ ||f^n(z, w)||_inf computed through the
/// normalized homogeneous lift, so orbits never overflow.
GreenValue green_affine(const PolyEndo2& f, Cx z, Cx w, const GreenOptions& opts);

}  // namespace greenlinker

#pragma once

#include <optional>
#include <vector>

#include "greenlinker/dynamics1d.hpp"
#include "greenlinker/endo.hpp"
#include "greenlinker/numerics.hpp"

namespace greenlinker {

/// f(z, w) = (p(z), q(z, w)) with p monic of degree d and q monic of degree d in w.
class SkewProduct {
public:
  SkewProduct() = default;
  /// Throws ValidationError unless deg p = w-degree of q = d >= 2, both are
  /// monic, and q has total degree <= d (so the lift to P^2 has degree d).
  SkewProduct(Poly1 p, Poly2W q);

  int degree() const noexcept { return p_.degree(); }
  const Poly1& p() const noexcept { return p_; }
  const Poly2W& q() const noexcept { return q_; }
  /// Homogeneous lift, computed once.
  const PolyEndo2& endo() const noexcept { return endo_; }

  std::pair<Cx, Cx> apply(Cx z, Cx w) const { return {eval(p_, z), q_.eval(z, w)}; }
  Poly1 fiber_map(Cx z) const { return q_.fiber(z); }

  bool operator==(const SkewProduct& o) const { return p_ == o.p_ && q_ == o.q_; }

private:
  Poly1 p_;
  Poly2W q_;
  PolyEndo2 endo_;
};

/// [Z:W:T] -> [P(Z,T) : Q(Z,W,T) : T^d].
PolyEndo2 homogenize(const SkewProduct& f);
/// Inverse of homogenize; throws ValidationError when P depends on W.
SkewProduct dehomogenize(const PolyEndo2& endo);

/// Forward base orbit z_0 .. z_depth with a fiberwise escape radius valid on
/// every fiber of the orbit.
struct FiberContext {
  Cx z0;
  std::vector<Cx> orbit;
  /// max |z_k| over the stored orbit.
  double z_bound = 0.0;
  double radius = 2.0;      ///< fiberwise escape radius over |z| <= z_bound
  double lower_sum = 0.0;   ///< bound on the lower-coefficient sum of q_z
  /// True when the base orbit left the escape radius of p. The context then
  /// stops at the escape and fiber quantities fall back to G_affine - G_p.
  bool base_escapes = false;
  int depth() const noexcept { return static_cast<int>(orbit.size()) - 1; }

  /// Context of z_n, sharing the same radius.
  FiberContext shifted(int n) const;
};

inline constexpr int kDefaultContextDepth = 256;

FiberContext make_fiber_context(const SkewProduct& f, Cx z0, int depth = kDefaultContextDepth);

GreenValue green_affine(const SkewProduct& f, Cx z, Cx w, const GreenOptions& opts = {});

/// G_z(w) along ctx's orbit through vertical escape.
GreenValue green_fiber(const SkewProduct& f, const FiberContext& ctx, Cx w, const GreenOptions& opts = {});

/// Unit phase and log-modulus of the n-th fiber iterate, switching to log
/// form above kLogFormThreshold. Requires a bounded base context.
struct LogPoint {
  double log_modulus = 0.0;
  Cx phase = 1.0;
  bool overflowed = false;
};
LogPoint fiber_iterate_log(const SkewProduct& f, const FiberContext& ctx, Cx w, int n);

/// Roots of dq/dw(z, .), d - 1 of them with multiplicity.
std::vector<Cx> fiber_critical_points(const SkewProduct& f, Cx z);
/// q_z(c) for every critical point c.
std::vector<Cx> fiber_critical_values(const SkewProduct& f, Cx z);

enum class ConnectivityVerdict { disconnected, no_escaping_critical_point, undetermined };

const char* to_string(ConnectivityVerdict v) noexcept;

struct ConnectivityCertificate {
  ConnectivityVerdict verdict = ConnectivityVerdict::undetermined;
  int depth = 0;
  struct Witness {
    int orbit_index = 0;
    Cx base_point;
    Cx critical_point;
    GreenValue green;
  };
  std::optional<Witness> witness;
};

ConnectivityCertificate connectivity_certificate(const SkewProduct& f, Cx z0, int depth, const GreenOptions& opts = {});

enum class QuadraticClass { ball_basins, infinitely_generated_vertical_basin, undetermined };

const char* to_string(QuadraticClass c) noexcept;

struct QuadraticClassification {
  QuadraticClass cls = QuadraticClass::undetermined;
  MandelbrotResult membership;
};

/// f_a(z, w) = (z^2, w^2 + a z), classified through the membership of a in M.
QuadraticClassification classify_quadratic_family(Cx a, int max_iter = 2000);

}  // namespace greenlinker

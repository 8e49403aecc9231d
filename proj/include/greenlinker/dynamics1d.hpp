#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "greenlinker/endo.hpp"
#include "greenlinker/numerics.hpp"

namespace greenlinker {

enum class GreenStatus {
  escaped,       ///< orbit left the escape radius; value > 0
  bounded,       ///< orbit stayed inside the escape radius through depth; value == 0
  undetermined,  ///< the certified bound did not reach the requested target
};

const char* to_string(GreenStatus s) noexcept;

/// Potential estimate in natural-log units. When bound.valid the true value
/// lies in [value - bound.value, value + bound.value] (and is >= 0).
struct GreenValue {
  double value = 0.0;
  int depth = 0;
  ErrBound bound;
  GreenStatus status = GreenStatus::undetermined;

  bool certified_positive() const noexcept {
    return status == GreenStatus::escaped && bound.valid && value - bound.value > 0.0;
  }
};

struct GreenOptions {
  double target_err = 1e-10;
  int max_depth = 200;
  /// Stop exactly at this depth instead of at the first depth meeting target_err.
  std::optional<int> fixed_depth;
};

/// Escape-rate potential of a monic polynomial of degree >= 2.
GreenValue green_poly(const Poly1& p, Cx z, const GreenOptions& opts = {});

/// Smallest period k <= tail.size()-1 with |tail.back() - tail[end-1-k]| < tol, or 0.
int detect_period(std::span<const Cx> tail, double tol = 1e-9);

enum class CriticalFate { escaping, attracted, bounded_undetermined };

const char* to_string(CriticalFate f) noexcept;

struct CriticalPointReport {
  Cx point;
  bool escapes = false;
  GreenValue green;
  CriticalFate fate = CriticalFate::bounded_undetermined;
  /// Detected period of the attracting cycle, 0 when none was detected.
  int period = 0;
};

struct CriticalReport {
  std::vector<CriticalPointReport> points;
  int max_iter = 0;
  int escaping_count() const;
};

/// Classifies every root of p'. Cycle periods are detected heuristically by
/// near-return over the last quarter of the orbit, never proved.
CriticalReport critical_report(const Poly1& p, int max_iter);

enum class MandelbrotVerdict { inside, outside, undetermined };

const char* to_string(MandelbrotVerdict v) noexcept;

struct MandelbrotResult {
  MandelbrotVerdict verdict = MandelbrotVerdict::undetermined;
  /// First iterate index with modulus > 2 when outside.
  int escape_depth = -1;
  int period = 0;
};

/// Critical-orbit test for w^2 + a with radius 2. Inside means bounded with
/// a detected attracting cycle; bounded without one is undetermined.
MandelbrotResult mandelbrot_member(Cx a, int max_iter);

struct RestrictionAtInfinity {
  HomogeneousForm2 p0;  ///< P(Z, W, 0)
  HomogeneousForm2 q0;  ///< Q(Z, W, 0)
  bool is_polynomial = false;
  enum class Chart { z_over_w, w_over_z, none } chart = Chart::none;
  /// Monic conjugate of the restriction (when is_polynomial): the chart
  /// coordinate is chart_scale * xi, where xi is the variable of polynomial.
  Poly1 polynomial;
  Cx chart_scale = 1.0;
};

/// Restriction of f = [P : Q : T^d] to the line at infinity T = 0.
/// Throws ValidationError when P0 and Q0 share a root.
RestrictionAtInfinity restriction_at_infinity(const PolyEndo2& endo);

}  // namespace greenlinker

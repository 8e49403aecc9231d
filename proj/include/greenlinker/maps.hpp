#pragma once

#include <optional>
#include <string>
#include <vector>

#include "greenlinker/loop.hpp"
#include "greenlinker/skew.hpp"

namespace greenlinker {

enum class MapKind { skew, endo, poly };

const char* to_string(MapKind k) noexcept;

/// A named map: a skew product (with its homogeneous lift), a general
/// endomorphism of P^2, or a one-variable polynomial.
struct MapSpec {
  std::string name;
  MapKind kind = MapKind::poly;
  std::optional<SkewProduct> skew;
  std::optional<PolyEndo2> endo;
  std::optional<Poly1> poly;

  int degree() const;
  /// The endomorphism (skew products are homogenized). Throws for polynomials.
  const PolyEndo2& as_endo() const;
};

/// example-0.3, example-jonsson, rabbit-endo, rabbit-cubic, product,
/// cantor-infinity, z2, z2+1, and quadratic:<a> for any complex a.
MapSpec builtin_map(const std::string& name);
std::vector<std::string> builtin_map_names();

/// (z^2, w^2 + a z).
SkewProduct quadratic_family(Cx a);

/// Closed sector 0 -> radius e^{i rotation} -> arc to radius e^{i (rotation + pi/2)} -> 0
/// in the fiber over z0. For example-0.3 over 0.99999 it encloses one of
/// the four generation-2 pieces of the filled fiber set.
OrientedLoop quarter_sector_loop(Cx z0, double radius = 2.0, double rotation = 0.0);

/// Parses "1", "-0.5", "0.5i", "1+2i", "1.5-0.25i", "i", "-i".
Cx parse_complex(const std::string& text);

}  // namespace greenlinker

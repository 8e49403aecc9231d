#include "greenlinker/maps.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <numbers>

namespace greenlinker {

namespace {

const Cx kRabbitC(0.706260, 0.502896);

MapSpec from_skew(std::string name, SkewProduct f) {
  MapSpec m;
  m.name = std::move(name);
  m.kind = MapKind::skew;
  m.endo = f.endo();
  m.skew = std::move(f);
  return m;
}

MapSpec from_poly(std::string name, Poly1 p) {
  MapSpec m;
  m.name = std::move(name);
  m.kind = MapKind::poly;
  m.poly = std::move(p);
  return m;
}

}  // namespace

const char* to_string(MapKind k) noexcept {
  switch (k) {
    case MapKind::skew: return "skew";
    case MapKind::endo: return "endo";
    case MapKind::poly: return "poly";
  }
  return "?";
}

int MapSpec::degree() const {
  if (poly) return poly->degree();
  return endo->degree();
}

const PolyEndo2& MapSpec::as_endo() const {
  if (!endo) throw ValidationError("map '" + name + "' is a one-variable polynomial, not an endomorphism of P^2");
  return *endo;
}

SkewProduct quadratic_family(Cx a) {
  return SkewProduct(Poly1({0.0, 0.0, 1.0}), Poly2W({Poly1({0.0, a}), Poly1({0.0}), Poly1({1.0})}));
}

MapSpec builtin_map(const std::string& name) {
  if (name == "example-0.3") return from_skew(name, quadratic_family(0.3));
  if (name == "example-jonsson")
    return from_skew(name, SkewProduct(Poly1({-2.0, 0.0, 1.0}), Poly2W({Poly1({4.0, -2.0}), Poly1({0.0}), Poly1({1.0})})));
  if (name == "product")
    return from_skew(name, SkewProduct(Poly1({0.0, 0.0, 1.0}), Poly2W({Poly1({0.0}), Poly1({0.0}), Poly1({1.0})})));
  if (name == "cantor-infinity")
    return from_skew(name,
                     SkewProduct(Poly1({0.0, 0.0, 1.0}), Poly2W({Poly1({0.0, 0.0, 10.0}), Poly1({0.0}), Poly1({1.0})})));
  if (name == "rabbit-endo") {
    // [R(Z, W) : W^3 : T^3] with R the homogeneous form of the rabbit cubic.
    HomogeneousForm3 P(3), Q(3);
    P.set(3, 0, 1.0);
    P.set(1, 2, -0.48);
    P.set(0, 3, kRabbitC);
    Q.set(0, 3, 1.0);
    MapSpec m;
    m.name = name;
    m.kind = MapKind::endo;
    m.endo = PolyEndo2(std::move(P), std::move(Q));
    return m;
  }
  if (name == "rabbit-cubic") return from_poly(name, Poly1({kRabbitC, -0.48, 0.0, 1.0}));
  if (name == "z2") return from_poly(name, Poly1({0.0, 0.0, 1.0}));
  if (name == "z2+1") return from_poly(name, Poly1({1.0, 0.0, 1.0}));
  for (const char* prefix : {"quadratic:", "quadratic "})
    if (name.starts_with(prefix)) return from_skew(name, quadratic_family(parse_complex(name.substr(10))));
  throw ValidationError("unknown built-in map '" + name + "'");
}

std::vector<std::string> builtin_map_names() {
  return {"example-0.3", "example-jonsson", "rabbit-endo", "rabbit-cubic", "product",
          "cantor-infinity", "z2", "z2+1", "quadratic:<a>"};
}

OrientedLoop quarter_sector_loop(Cx z0, double radius, double rotation) {
  const double a0 = rotation, a1 = rotation + std::numbers::pi / 2;
  std::vector<Segment> segs{PolylineSegment{{0.0, std::polar(radius, a0)}}, ArcSegment{0.0, radius, a0, a1},
                            PolylineSegment{{std::polar(radius, a1), 0.0}}};
  return OrientedLoop(Ambient::fiber, std::move(segs), z0);
}

Cx parse_complex(const std::string& text) {
  std::string s;
  std::copy_if(text.begin(), text.end(), std::back_inserter(s), [](unsigned char c) { return !std::isspace(c); });
  if (s.empty()) throw ValidationError("empty complex number");
  auto bad = [&]() { return ValidationError("cannot parse complex number '" + text + "'"); };
  auto number = [&](const std::string& part, bool imaginary) -> double {
    std::string body = part;
    if (imaginary) {
      body.pop_back();
      if (body.empty() || body == "+") return 1.0;
      if (body == "-") return -1.0;
    }
    if (!body.empty() && body.front() == '+') body.erase(0, 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
    if (ec != std::errc() || ptr != body.data() + body.size()) throw bad();
    return v;
  };
  // Split at a sign that is neither leading nor part of an exponent.
  std::size_t split = std::string::npos;
  for (std::size_t k = 1; k < s.size(); ++k)
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') split = k;
  const bool ends_i = s.back() == 'i' || s.back() == 'j';
  if (split == std::string::npos) return ends_i ? Cx(0.0, number(s, true)) : Cx(number(s, false), 0.0);
  if (!ends_i) throw bad();
  return {number(s.substr(0, split), false), number(s.substr(split), true)};
}

}  // namespace greenlinker

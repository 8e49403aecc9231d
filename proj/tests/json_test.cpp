#include <doctest.h>

#include "greenlinker/json_io.hpp"

using namespace greenlinker;

TEST_CASE("complex and rational serialization") {
  CHECK(to_json(Cx(1.5, -2.0)) == Json::array({1.5, -2.0}));
  CHECK(cx_from_json(Json::parse("[0.25, 3]")) == Cx(0.25, 3.0));
  CHECK(cx_from_json(Json(2.0)) == Cx(2.0, 0.0));
  CHECK(cx_from_json(Json("1-0.5i")) == Cx(1.0, -0.5));
  CHECK(to_json(Mod1Rational(5, 4)) == Json::parse(R"({"num": 1, "den": 4})"));
  CHECK(rational_from_json(to_json(Rational(-3, 6))) == Rational(-1, 2));
}

TEST_CASE("complex parsing") {
  CHECK(parse_complex("i") == Cx(0.0, 1.0));
  CHECK(parse_complex("-i") == Cx(0.0, -1.0));
  CHECK(parse_complex("0.5i") == Cx(0.0, 0.5));
  CHECK(parse_complex("-2") == Cx(-2.0, 0.0));
  CHECK(parse_complex("1.5+2e-3i") == Cx(1.5, 0.002));
  CHECK_THROWS_AS(parse_complex("abc"), ValidationError);
}

TEST_CASE("loops round trip") {
  const OrientedLoop q = quarter_sector_loop(0.99999);
  const OrientedLoop back = loop_from_json(to_json(q));
  CHECK(back.ambient() == Ambient::fiber);
  CHECK(back.fiber() == q.fiber());
  CHECK(to_json(back) == to_json(q));
  CHECK(back.length() == doctest::Approx(q.length()));
  const Json bad = Json::parse(R"({"ambient": "plane", "segments": [{"type": "polyline", "points": [[0,0],[1,0]]}]})");
  CHECK_THROWS_AS(loop_from_json(bad), ValidationError);
}

TEST_CASE("maps from names and coefficients") {
  for (const auto& name : builtin_map_names()) {
    if (name.find('<') != std::string::npos) continue;
    const MapSpec m = map_from_json(Json(name));
    CHECK(m.degree() >= 2);
    const MapSpec again = map_from_json(to_json(m));
    CHECK(again.kind == m.kind);
    if (m.kind != MapKind::poly) CHECK(again.as_endo() == m.as_endo());
    else CHECK(*again.poly == *m.poly);
  }
  const MapSpec s = map_from_json(Json::parse(R"({"type": "skew", "p": [0, 0, 1], "q": [[0, 0.3], [0], [1]]})"));
  CHECK(s.as_endo() == builtin_map("example-0.3").as_endo());
  const MapSpec q = map_from_json(Json("quadratic:0.5i"));
  CHECK(q.skew->q() == quadratic_family(Cx(0.0, 0.5)).q());
  CHECK_THROWS_AS(map_from_json(Json("nonsense")), ValidationError);
  CHECK_THROWS_AS(map_from_json(Json::parse(R"({"type": "poly", "coeffs": [1, 2]})")), ValidationError);
}

TEST_CASE("results serialize with exact rationals") {
  LinkResult r;
  r.lk = Mod1Rational(1, 4);
  r.pairing = Rational(5, 4);
  const Json j = to_json(r);
  CHECK(j.at("lk") == Json::parse(R"({"num": 1, "den": 4})"));
  CHECK(j.at("pairing") == Json::parse(R"({"num": 5, "den": 4})"));
  CHECK(std::string(engine_version()).starts_with("greenlinker "));
}

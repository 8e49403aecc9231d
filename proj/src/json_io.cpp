#include "greenlinker/json_io.hpp"

#include <cmath>

namespace greenlinker {

const char* engine_version() noexcept { return "greenlinker 0.3.0"; }

Json to_json(Cx x) { return Json::array({x.real(), x.imag()}); }

Cx cx_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_string()) return parse_complex(j.get<std::string>());
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ValidationError("expected a complex number as [re, im], a number, or a string: " + j.dump());
}

Json to_json(const Rational& r) { return {{"num", r.num()}, {"den", r.den()}}; }
Json to_json(const Mod1Rational& r) { return {{"num", r.num()}, {"den", r.den()}}; }

Rational rational_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("num") || !j.contains("den"))
    throw ValidationError("expected a rational {\"num\", \"den\"}: " + j.dump());
  return Rational(j.at("num").get<std::int64_t>(), j.at("den").get<std::int64_t>());
}

namespace {

Ambient ambient_from(const std::string& s) {
  if (s == "fiber") return Ambient::fiber;
  if (s == "plane") return Ambient::plane;
  if (s == "affine_plane" || s == "affine-plane") return Ambient::affine_plane;
  throw ValidationError("unknown loop ambient '" + s + "'");
}

double number_field(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw ValidationError(std::string("segment field '") + key + "' missing or not a number");
  return j.at(key).get<double>();
}

std::vector<Cx> cx_list(const Json& j, const char* what) {
  if (!j.is_array()) throw ValidationError(std::string(what) + " must be an array");
  std::vector<Cx> out;
  for (const auto& x : j) out.push_back(cx_from_json(x));
  return out;
}

}  // namespace

Json to_json(const OrientedLoop& loop) {
  Json j;
  j["ambient"] = to_string(loop.ambient());
  if (loop.fiber()) j["fiber"] = to_json(*loop.fiber());
  Json segs = Json::array();
  for (const Segment& s : loop.segments()) {
    if (const auto* a = std::get_if<ArcSegment>(&s)) {
      segs.push_back({{"type", "arc"},
                      {"center", to_json(a->center)},
                      {"radius", a->radius},
                      {"from_angle", a->from_angle},
                      {"to_angle", a->to_angle}});
    } else {
      const auto& p = std::get<PolylineSegment>(s);
      Json pts = Json::array();
      for (const Cx& x : p.points) pts.push_back(to_json(x));
      segs.push_back({{"type", "polyline"}, {"points", pts}});
    }
  }
  j["segments"] = segs;
  return j;
}

OrientedLoop loop_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("loop must be a JSON object");
  const Ambient amb = ambient_from(j.value("ambient", std::string("plane")));
  std::optional<Cx> fiber;
  if (j.contains("fiber")) fiber = cx_from_json(j.at("fiber"));
  if (!j.contains("segments") || !j.at("segments").is_array()) throw ValidationError("loop needs a segments array");
  std::vector<Segment> segs;
  for (const auto& s : j.at("segments")) {
    const std::string type = s.value("type", std::string());
    if (type == "arc") {
      ArcSegment a;
      a.center = cx_from_json(s.at("center"));
      a.radius = number_field(s, "radius");
      a.from_angle = number_field(s, "from_angle");
      a.to_angle = number_field(s, "to_angle");
      segs.emplace_back(a);
    } else if (type == "polyline") {
      if (!s.contains("points")) throw ValidationError("polyline segment needs points");
      segs.emplace_back(PolylineSegment{cx_list(s.at("points"), "points")});
    } else {
      throw ValidationError("unknown segment type '" + type + "'");
    }
  }
  return OrientedLoop(amb, std::move(segs), fiber);
}

MapSpec map_from_json(const Json& j) {
  if (j.is_string()) return builtin_map(j.get<std::string>());
  if (!j.is_object()) throw ValidationError("map must be a name or an object");
  if (j.contains("builtin")) return builtin_map(j.at("builtin").get<std::string>());
  const std::string type = j.value("type", std::string());
  const std::string name = j.value("name", std::string("custom"));
  MapSpec m;
  m.name = name;
  if (type == "poly") {
    m.kind = MapKind::poly;
    m.poly = Poly1(cx_list(j.at("coeffs"), "coeffs"));
    if (m.poly->degree() < 2 || !m.poly->is_monic()) throw ValidationError("poly map must be monic of degree >= 2");
  } else if (type == "skew") {
    std::vector<Poly1> qc;
    for (const auto& c : j.at("q")) qc.emplace_back(cx_list(c, "q coefficient"));
    SkewProduct f(Poly1(cx_list(j.at("p"), "p")), Poly2W(std::move(qc)));
    m.kind = MapKind::skew;
    m.endo = f.endo();
    m.skew = std::move(f);
  } else if (type == "endo") {
    const int d = j.at("degree").get<int>();
    if (d < 2) throw ValidationError("endomorphism degree must be >= 2");
    auto form = [&](const char* key) {
      HomogeneousForm3 F(d);
      for (const auto& t : j.at(key)) F.add(t.at("z").get<int>(), t.at("w").get<int>(), cx_from_json(t.at("c")));
      return F;
    };
    m.kind = MapKind::endo;
    m.endo = PolyEndo2(form("P"), form("Q"));
  } else {
    throw ValidationError("map type must be poly, skew or endo");
  }
  return m;
}

namespace {

Json coeff_list(const Poly1& p) {
  Json a = Json::array();
  for (const Cx& c : p.coeffs()) a.push_back(to_json(c));
  return a;
}

Json form_terms(const HomogeneousForm3& F) {
  Json a = Json::array();
  for (int i = 0; i <= F.degree(); ++i)
    for (int j = 0; i + j <= F.degree(); ++j)
      if (F.coeff(i, j) != Cx{}) a.push_back({{"z", i}, {"w", j}, {"c", to_json(F.coeff(i, j))}});
  return a;
}

}  // namespace

Json to_json(const MapSpec& m) {
  Json j;
  j["name"] = m.name;
  j["type"] = to_string(m.kind);
  switch (m.kind) {
    case MapKind::poly: j["coeffs"] = coeff_list(*m.poly); break;
    case MapKind::skew: {
      j["p"] = coeff_list(m.skew->p());
      Json q = Json::array();
      for (const Poly1& c : m.skew->q().w_coeffs()) q.push_back(coeff_list(c));
      j["q"] = q;
      break;
    }
    case MapKind::endo:
      j["degree"] = m.endo->degree();
      j["P"] = form_terms(m.endo->p());
      j["Q"] = form_terms(m.endo->q());
      break;
  }
  return j;
}

Json to_json(const GreenValue& g) {
  return {{"value", g.value},
          {"depth", g.depth},
          {"bound", {{"value", g.bound.value}, {"valid", g.bound.valid}}},
          {"status", to_string(g.status)},
          {"certified_positive", g.certified_positive()}};
}

Json to_json(const WindingCertificate& c) {
  Json j{{"depth", c.depth},
         {"winding", c.winding},
         {"winding_next", c.winding_next},
         {"stabilization_checked", c.stabilization_checked},
         {"min_image_log_modulus", c.min_image_log_modulus},
         {"samples", c.samples},
         {"initial_samples", c.initial_samples},
         {"max_escape_step", c.max_escape_step}};
  if (!c.reason.empty()) j["reason"] = c.reason;
  return j;
}

Json to_json(const LinkResult& r) {
  return {{"lk", to_json(r.lk)}, {"pairing", to_json(r.pairing)}, {"certificate", to_json(r.cert)}};
}

Json to_json(const LiftBundle& b) {
  Json loops = Json::array();
  for (const auto& l : b.loops) loops.push_back({{"covering_degree", l.covering_degree}, {"loop", to_json(l.loop)}});
  return {{"source_fiber", to_json(b.source_fiber)},
          {"target_fiber", to_json(b.target_fiber)},
          {"max_residual", b.max_residual},
          {"continuation_steps", b.continuation_steps},
          {"loops", loops}};
}

Json to_json(const LinkingSequence& s) {
  Json steps = Json::array();
  for (const auto& st : s.steps)
    steps.push_back({{"index", st.index},
                     {"base_point", to_json(st.base_point)},
                     {"lk", to_json(st.link.lk)},
                     {"pairing", to_json(st.link.pairing)},
                     {"covering_degree", st.covering_degree},
                     {"enclosed_next_critical_values", st.enclosed_next_critical_values},
                     {"jitter_retries", st.jitter_retries},
                     {"pairing_identity", st.pairing_identity},
                     {"certificate", to_json(st.link.cert)},
                     {"loop", to_json(st.loop)}});
  Json j{{"steps", steps}, {"truncated", s.truncated}, {"contraction_holds", s.contraction_holds}};
  if (!s.diagnostic.empty()) j["diagnostic"] = s.diagnostic;
  return j;
}

Json to_json(const SeparationResult& s, bool include_loops) {
  Json loops = Json::array();
  for (const auto& l : s.loops) {
    Json e = to_json(l.link);
    e["separating"] = !l.link.lk.is_zero();
    e["vertices"] = std::get<PolylineSegment>(l.loop.segments().front()).points.size();
    if (include_loops) e["loop"] = to_json(l.loop);
    loops.push_back(e);
  }
  return {{"level", s.level},
          {"loops", loops},
          {"open_contours", s.open_contours},
          {"rejected", s.rejected},
          {"warnings", s.warnings}};
}

Json to_json(const CriticalReport& r) {
  Json pts = Json::array();
  for (const auto& p : r.points) {
    Json e{{"point", to_json(p.point)}, {"escapes", p.escapes}, {"fate", to_string(p.fate)}, {"green", to_json(p.green)}};
    if (p.fate == CriticalFate::attracted) e["detected_period"] = p.period;
    pts.push_back(e);
  }
  return {{"max_iter", r.max_iter}, {"escaping", r.escaping_count()}, {"critical_points", pts}};
}

Json to_json(const ConnectivityCertificate& c) {
  Json j{{"verdict", to_string(c.verdict)}, {"depth", c.depth}};
  if (c.witness)
    j["witness"] = {{"orbit_index", c.witness->orbit_index},
                    {"base_point", to_json(c.witness->base_point)},
                    {"critical_point", to_json(c.witness->critical_point)},
                    {"green", to_json(c.witness->green)}};
  return j;
}

Json to_json(const QuadraticClassification& q) {
  Json j{{"class", to_string(q.cls)}, {"membership", to_string(q.membership.verdict)}};
  if (q.membership.escape_depth >= 0) j["escape_depth"] = q.membership.escape_depth;
  if (q.membership.period > 0) j["detected_period"] = q.membership.period;
  return j;
}

Json to_json(const MassEstimate& e) {
  return {{"estimate", e.estimate}, {"stderr", e.stderr_}, {"used", e.used}, {"discarded", e.discarded}};
}

}  // namespace greenlinker

#pragma once

#include <json.hpp>

#include "greenlinker/contour.hpp"
#include "greenlinker/linking.hpp"
#include "greenlinker/maps.hpp"
#include "greenlinker/measure.hpp"

namespace greenlinker {

using Json = nlohmann::ordered_json;

const char* engine_version() noexcept;

/// [re, im]; parsing also accepts a bare number or a string like "1+2i".
Json to_json(Cx x);
Cx cx_from_json(const Json& j);

/// {"num": k, "den": m}
Json to_json(const Rational& r);
Json to_json(const Mod1Rational& r);
Rational rational_from_json(const Json& j);

/// {ambient, fiber?, segments: [{type: "arc", center, radius, from_angle,
/// to_angle} | {type: "polyline", points}]}
Json to_json(const OrientedLoop& loop);
OrientedLoop loop_from_json(const Json& j);

/// A built-in name, {"builtin": name}, or explicit coefficients:
/// {"type": "poly", "coeffs": [...]}, {"type": "skew", "p": [...], "q": [[...], ...]}
/// (q[j] holds the z-coefficients of w^j), or {"type": "endo", "degree": d,
/// "P": [{"z": i, "w": j, "c": x}, ...], "Q": [...]}.
MapSpec map_from_json(const Json& j);
Json to_json(const MapSpec& m);

Json to_json(const GreenValue& g);
Json to_json(const WindingCertificate& c);
Json to_json(const LinkResult& r);
Json to_json(const LiftBundle& b);
Json to_json(const LinkingSequence& s);
Json to_json(const SeparationResult& s, bool include_loops = true);
Json to_json(const CriticalReport& r);
Json to_json(const ConnectivityCertificate& c);
Json to_json(const QuadraticClassification& q);
Json to_json(const MassEstimate& e);

}  // namespace greenlinker

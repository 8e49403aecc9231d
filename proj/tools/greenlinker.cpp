#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "greenlinker/acceptance.hpp"
#include "greenlinker/contour.hpp"
#include "greenlinker/json_io.hpp"
#include "greenlinker/parallel.hpp"
#include "greenlinker/raster.hpp"

using namespace greenlinker;

namespace {

enum ExitCode { kOk = 0, kValidation = 2, kUndetermined = 3, kInternal = 4 };

enum class Kind { string, integer, number, complex, boolean, map, loop, points, integers, window };

struct Field {
  std::string name;
  Kind kind;
  Json fallback;  // null means "derived when not given"
  std::string help;
};

struct Outcome {
  Json result;
  bool determined = true;
};

using Runner = std::function<Outcome(const Json& job, int threads)>;

struct Command {
  std::string name;
  std::string help;
  std::vector<Field> fields;
  Runner run;
};

std::string flag_name(const std::string& field) {
  std::string s = field;
  for (char& c : s)
    if (c == '_') c = '-';
  return "--" + s;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

Json parse_point(const Json& v) {
  if (v.is_object()) return {{"z", to_json(cx_from_json(v.at("z")))}, {"w", to_json(cx_from_json(v.at("w")))}};
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    const auto comma = s.find(',');
    if (comma != std::string::npos)
      return {{"z", to_json(parse_complex(s.substr(0, comma)))}, {"w", to_json(parse_complex(s.substr(comma + 1)))}};
  }
  return to_json(cx_from_json(v));
}

// Checks one value against its field kind and returns the canonical form.
Json normalize(const Field& f, const Json& v) {
  if (v.is_null()) return v;
  try {
    switch (f.kind) {
      case Kind::string:
        if (!v.is_string()) break;
        return v;
      case Kind::integer:
        if (v.is_number_integer()) return v;
        if (v.is_string()) return std::stoll(v.get<std::string>());
        if (v.is_number_float() && v.get<double>() == static_cast<double>(static_cast<long long>(v.get<double>())))
          return static_cast<long long>(v.get<double>());
        break;
      case Kind::number:
        if (v.is_number()) return v.get<double>();
        if (v.is_string()) return std::stod(v.get<std::string>());
        break;
      case Kind::complex: return to_json(cx_from_json(v));
      case Kind::boolean:
        if (v.is_boolean()) return v;
        if (v == "true" || v == "1") return true;
        if (v == "false" || v == "0") return false;
        break;
      case Kind::map: map_from_json(v); return v;
      case Kind::loop:
        if (v.is_string()) return read_json_file(v.get<std::string>());
        if (v.is_object()) return v;
        break;
      case Kind::points: {
        if (!v.is_array()) break;
        Json out = Json::array();
        for (const auto& p : v) out.push_back(parse_point(p));
        return out;
      }
      case Kind::integers: {
        if (!v.is_array()) break;
        Json out = Json::array();
        for (const auto& x : v) out.push_back(x.is_string() ? Json(std::stoll(x.get<std::string>())) : Json(x.get<long long>()));
        return out;
      }
      case Kind::window: {
        if (!v.is_object()) break;
        return {{"center", to_json(cx_from_json(v.value("center", Json(0.0))))},
                {"half_width", v.at("half_width").get<double>()},
                {"half_height", v.value("half_height", v.at("half_width").get<double>())}};
      }
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw ValidationError("field " + f.name + ": " + e.what());
  }
  throw ValidationError("field " + f.name + " has the wrong type");
}

Cx cx(const Json& job, const char* key) { return cx_from_json(job.at(key)); }

LinkingOptions linking_options(const Json& job) {
  LinkingOptions o;
  o.initial_samples = job.at("initial_samples").get<int>();
  o.extra_depth = job.at("extra_depth").get<int>();
  o.max_depth = job.at("max_depth").get<int>();
  if (o.initial_samples < 8) throw ValidationError("initial_samples must be >= 8");
  if (o.extra_depth < 0) throw ValidationError("extra_depth must be >= 0");
  return o;
}

std::vector<Field> linking_fields() {
  return {{"initial_samples", Kind::integer, 512, "initial loop samples"},
          {"extra_depth", Kind::integer, 2, "depth added past the last escape step"},
          {"max_depth", Kind::integer, 200, "escape search depth"}};
}

OrientedLoop job_loop(const Json& job) {
  if (job.at("loop").is_null()) throw ValidationError("a loop is required");
  return loop_from_json(job.at("loop"));
}

// A fiber loop without a base point takes the job's fiber; then the loop is validated.
void resolve_loop(Json& job) {
  if (!job.contains("loop") || job.at("loop").is_null()) return;
  Json& l = job["loop"];
  if (l.value("ambient", "") == "fiber" && !l.contains("fiber") && job.contains("fiber") && !job.at("fiber").is_null())
    l["fiber"] = job.at("fiber");
  loop_from_json(l);
}

Cx require_fiber(const Json& job) {
  if (job.at("fiber").is_null()) throw ValidationError("--fiber is required for a skew product");
  return cx(job, "fiber");
}

const SkewProduct& require_skew(const MapSpec& m) {
  if (!m.skew) throw ValidationError("map " + m.name + " is not a skew product");
  return *m.skew;
}

Outcome run_green(const Json& job, int) {
  const MapSpec m = map_from_json(job.at("map"));
  GreenOptions go;
  go.target_err = job.at("target_err").get<double>();
  go.max_depth = job.at("max_depth").get<int>();
  std::optional<FiberContext> ctx;
  if (!job.at("fiber").is_null()) ctx = make_fiber_context(require_skew(m), cx(job, "fiber"));
  Outcome out;
  out.result = Json::array();
  for (const Json& p : job.at("points")) {
    GreenValue g;
    Json entry;
    if (p.is_object()) {
      const Cx z = cx_from_json(p.at("z")), w = cx_from_json(p.at("w"));
      g = green_affine(m.as_endo(), z, w, go);
      entry = {{"z", to_json(z)}, {"w", to_json(w)}, {"potential", "affine"}};
    } else if (ctx) {
      g = green_fiber(*m.skew, *ctx, cx_from_json(p), go);
      entry = {{"w", p}, {"potential", "fiber"}};
    } else if (m.poly) {
      g = green_poly(*m.poly, cx_from_json(p), go);
      entry = {{"z", p}, {"potential", "polynomial"}};
    } else if (m.skew) {
      g = green_poly(m.skew->p(), cx_from_json(p), go);
      entry = {{"z", p}, {"potential", "base"}};
    } else {
      throw ValidationError("points for an endomorphism need both coordinates (z,w)");
    }
    entry["green"] = to_json(g);
    if (g.status == GreenStatus::undetermined) out.determined = false;
    out.result.push_back(entry);
  }
  return out;
}

Outcome run_classify(const Json& job, int) {
  Outcome out;
  const std::string family = job.at("family").get<std::string>();
  if (family == "quadratic") {
    const QuadraticClassification q = classify_quadratic_family(cx(job, "a"), job.at("max_iter").get<int>());
    out.result = to_json(q);
    out.determined = q.cls != QuadraticClass::undetermined;
    return out;
  }
  if (!family.empty()) throw ValidationError("unknown family " + family);
  const MapSpec m = map_from_json(job.at("map"));
  if (m.poly) {
    const CriticalReport r = critical_report(*m.poly, job.at("max_iter").get<int>());
    out.result = to_json(r);
    for (const auto& p : r.points)
      if (p.fate == CriticalFate::bounded_undetermined) out.determined = false;
    return out;
  }
  const ConnectivityCertificate c = connectivity_certificate(require_skew(m), require_fiber(job), job.at("depth").get<int>());
  out.result = to_json(c);
  out.determined = c.verdict != ConnectivityVerdict::undetermined;
  return out;
}

LinkResult link_any(const MapSpec& m, const OrientedLoop& loop, const LinkingOptions& o) {
  if (m.poly) return linking_poly_1d(*m.poly, loop, o);
  if (loop.ambient() == Ambient::fiber) {
    const SkewProduct& f = require_skew(m);
    return linking_fiber(f, make_fiber_context(f, *loop.fiber()), loop, o);
  }
  return linking_at_infinity(m.as_endo(), loop, o);
}

Outcome run_link(const Json& job, int) {
  const MapSpec m = map_from_json(job.at("map"));
  return {to_json(link_any(m, job_loop(job), linking_options(job)))};
}

Outcome run_lift(const Json& job, int) {
  const MapSpec m = map_from_json(job.at("map"));
  const OrientedLoop loop = job_loop(job);
  const LinkingOptions lo = linking_options(job);
  LiftOptions opts;
  opts.margin = job.at("margin").get<double>();
  LiftBundle b;
  if (m.poly) {
    b = lift_loop(*m.poly, loop, opts);
  } else {
    const SkewProduct& f = require_skew(m);
    if (!loop.fiber()) throw ValidationError("lift needs a fiber loop");
    const Cx z1 = job.at("z1").is_null() ? default_backward_chooser(f.p())(*loop.fiber()) : cx(job, "z1");
    b = lift_loop(f, z1, loop, opts);
  }
  Json r = to_json(b);
  if (job.at("with_linking").get<bool>()) {
    r["source_lk"] = to_json(link_any(m, loop, lo).lk);
    Json lks = Json::array();
    for (const auto& l : b.loops) lks.push_back(to_json(link_any(m, l.loop, lo).lk));
    r["lifted_lk"] = lks;
  }
  return {r};
}

Outcome run_sequence(const Json& job, int) {
  const MapSpec m = map_from_json(job.at("map"));
  const SkewProduct& f = require_skew(m);
  const Cx z0 = require_fiber(job);
  const OrientedLoop seed = job.at("loop").is_null() ? quarter_sector_loop(z0) : job_loop(job);
  SequenceOptions so;
  so.linking = linking_options(job);
  so.max_jitter = job.at("max_jitter").get<int>();
  so.jitter_step = job.at("jitter_step").get<double>();
  const LinkingSequence s = generate_linking_sequence(f, z0, seed, job.at("steps").get<int>(), {}, so);
  Json r = to_json(s);
  bool distinct_nonzero = !s.steps.empty();
  for (std::size_t i = 0; i < s.steps.size(); ++i) {
    if (s.steps[i].link.lk.is_zero()) distinct_nonzero = false;
    for (std::size_t j = 0; j < i; ++j)
      if (s.steps[j].link.lk == s.steps[i].link.lk) distinct_nonzero = false;
  }
  // Pairwise distinct nonzero linking values are the H1 certificate.
  r["h1_certificate"] = {{"distinct_nonzero_linking", distinct_nonzero},
                         {"contraction_holds", s.contraction_holds},
                         {"infinitely_generated", distinct_nonzero && s.contraction_holds && !s.truncated}};
  return {r, !s.truncated};
}

Outcome run_separate(const Json& job, int threads) {
  const MapSpec m = map_from_json(job.at("map"));
  SeparationOptions so;
  so.threads = threads;
  so.linking = linking_options(job);
  const int res = job.at("resolution").get<int>();
  const int gen = job.at("generation").get<int>();
  const bool loops = job.at("include_loops").get<bool>();
  auto radius_or = [&](double r) { return job.at("radius").is_null() ? r : job.at("radius").get<double>(); };
  auto level_or = [&](double l) { return job.at("level").is_null() ? l : job.at("level").get<double>(); };
  SeparationResult s;
  if (m.poly) {
    so.grid = default_grid(radius_or(escape_radius(*m.poly)), res);
    s = find_separating_loops(*m.poly, level_or(default_separation_level(*m.poly, gen)), so);
  } else if (!job.at("fiber").is_null()) {
    const SkewProduct& f = require_skew(m);
    const FiberContext ctx = make_fiber_context(f, cx(job, "fiber"));
    so.grid = default_grid(radius_or(ctx.radius), res);
    s = find_separating_loops(f, ctx, level_or(default_separation_level(f, ctx, gen)), so);
  } else {
    const RestrictionAtInfinity ri = restriction_at_infinity(m.as_endo());
    if (!ri.is_polynomial) throw UnsupportedError("the restriction at infinity is not polynomial");
    so.grid = default_grid(radius_or(0.8 * std::abs(ri.chart_scale) * escape_radius(ri.polynomial)), res);
    s = find_separating_loops(m.as_endo(), level_or(default_separation_level(ri.polynomial, gen)), so);
  }
  return {to_json(s, loops), !s.loops.empty()};
}

Outcome run_render(const Json& job, int threads) {
  const std::string mode = job.at("mode").get<std::string>();
  const int w = job.at("width").get<int>(), h = job.at("height").get<int>();
  if (w < 1 || h < 1) throw ValidationError("width and height must be positive");
  const std::string isa_name = job.at("isa").get<std::string>();
  kernels::Isa isa = kernels::active_isa();
  if (isa_name == "scalar") isa = kernels::Isa::scalar;
  else if (isa_name == "avx2") isa = kernels::Isa::avx2;
  else if (isa_name != "auto") throw ValidationError("isa must be auto, scalar or avx2");
  auto window_or = [&](const Window& fallback) {
    const Json& wj = job.at("window");
    if (wj.is_null()) return fallback;
    return Window{cx_from_json(wj.at("center")), wj.at("half_width").get<double>(), wj.at("half_height").get<double>()};
  };
  ImageGrid img;
  Json extra = Json::object();
  if (mode == "parameter") {
    const int iters = job.at("depth").is_null() ? 500 : job.at("depth").get<int>();
    img = render_parameter_plane(window_or(Window{Cx(-0.5, 0.0), 1.6, 1.3}), w, h, iters, threads, isa);
  } else {
    const MapSpec m = map_from_json(job.at("map"));
    const SkewProduct& f = require_skew(m);
    const Cx z0 = require_fiber(job);
    int depth = 0;
    if (job.at("depth").is_null()) {
      const auto d = fiber_generation_depth(f, z0, job.at("generation").get<int>());
      depth = d ? *d : 256;
    } else {
      depth = job.at("depth").get<int>();
    }
    if (mode == "fiber") {
      img = render_fiber(f, z0, window_or(default_fiber_window(f, z0, depth)), w, h, depth, threads, isa);
      const ComponentCount c = count_components(img, kBounded);
      extra["bounded_components"] = {{"interior", c.interior}, {"touching_boundary", c.boundary}};
    } else if (mode == "green") {
      img = render_green(f, z0, window_or(default_fiber_window(f, z0, depth)), w, h, threads);
    } else {
      throw ValidationError("mode must be fiber, parameter or green");
    }
  }
  const std::string image = job.at("image").get<std::string>();
  if (!image.empty()) {
    write_ppm(image, img);
    std::ofstream side(image + ".json");
    side << sidecar_json(img) << "\n";
  }
  Json r = Json::parse(sidecar_json(img));
  r["isa"] = kernels::to_string(isa);
  for (auto& [k, v] : extra.items()) r[k] = v;
  if (!image.empty()) r["image"] = image;
  return {r};
}

Outcome run_oracle(const Json& job, int threads) {
  const MapSpec m = map_from_json(job.at("map"));
  const int depth = job.at("depth").get<int>(), count = job.at("count").get<int>();
  const auto seed = job.at("seed").get<std::uint64_t>();
  const Cx b = cx(job, "basepoint");
  EmpiricalMeasure em;
  OrientedLoop loop = OrientedLoop::circle(0.0, 1.0);
  if (m.poly) {
    em = brolin_sample(*m.poly, b, depth, count, seed, threads);
    loop = job_loop(job);
  } else {
    const Cx z0 = require_fiber(job);
    em = brolin_sample_fiber(require_skew(m), z0, b, depth, count, seed, threads);
    loop = job.at("loop").is_null() ? quarter_sector_loop(z0) : job_loop(job);
  }
  const MassEstimate e = estimate_enclosed_mass(em, loop, job.at("discard_tol").get<double>(), threads);
  Json r = to_json(e);
  r["branch_failures"] = em.failures;
  const auto snapped = snap_to_dyadic(e.estimate, e.stderr_, m.degree(), job.at("snap_levels").get<int>());
  r["snapped"] = snapped ? to_json(*snapped) : Json(nullptr);
  if (job.at("compare_exact").get<bool>()) r["exact_lk"] = to_json(link_any(m, loop, {}).lk);
  return {r};
}

Outcome run_selftest(const Json& job, int threads) {
  AcceptanceOptions o;
  o.threads = threads;
  for (const auto& id : job.at("only")) o.only.push_back(id.get<int>());
  bool all = true;
  Json rows = Json::array();
  for (const CriterionResult& c : run_acceptance(o, [](const CriterionResult& c) {
         std::cerr << format_result(c) << std::endl;
       })) {
    all = all && c.pass;
    rows.push_back({{"id", c.id}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail}, {"seconds", c.seconds}});
  }
  return {{{"criteria", rows}, {"all_pass", all}}, all};
}

std::vector<Command> commands() {
  const Field map{"map", Kind::map, "example-0.3", "built-in name or JSON map description"};
  const Field fiber{"fiber", Kind::complex, nullptr, "base point z0 of the vertical fiber"};
  const Field loop{"loop", Kind::loop, nullptr, "loop JSON file (or inline object in a job file)"};
  auto with = [](std::vector<Field> a, const std::vector<Field>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  return {
      {"green", "Green potentials at points",
       {map, fiber, {"points", Kind::points, Json::array(), "point z, or z,w for the affine potential"},
        {"target_err", Kind::number, 1e-10, "tail bound target"}, {"max_depth", Kind::integer, 200, "iteration cap"}},
       run_green},
      {"classify", "connectivity certificate, critical report or quadratic-family class",
       {map, fiber, {"family", Kind::string, "", "\"quadratic\" to classify (z^2, w^2 + a z)"},
        {"a", Kind::complex, 0.0, "quadratic-family parameter"},
        {"depth", Kind::integer, 20, "base orbit steps searched for an escaping critical point"},
        {"max_iter", Kind::integer, 2000, "orbit length for critical orbits"}},
       run_classify},
      {"link", "exact linking number of a loop with the Green current", with({map, fiber, loop}, linking_fields()),
       run_link},
      {"lift", "preimage of a loop under the fiber map",
       with({map, fiber, loop, {"z1", Kind::complex, nullptr, "preimage fiber (default: largest-modulus root)"},
             {"margin", Kind::number, 1e-7, "minimum distance to critical values"},
             {"with_linking", Kind::boolean, true, "link the source and every lifted loop"}},
            linking_fields()),
       run_lift},
      {"sequence", "linking sequence along a backward base orbit",
       with({map, {"fiber", Kind::complex, 0.99999, "base point z0"}, loop,
             {"steps", Kind::integer, 8, "lifting steps"},
             {"max_jitter", Kind::integer, 8, "retries when a critical value is near the loop"},
             {"jitter_step", Kind::number, 1e-6, "jitter radius"}},
            linking_fields()),
       run_sequence},
      {"separate", "level-curve loops separating Julia components",
       with({map, fiber, {"level", Kind::number, nullptr, "level of G (default from critical values)"},
             {"generation", Kind::integer, 1, "critical generation the default level separates"},
             {"radius", Kind::number, nullptr, "grid radius (default from the escape radius)"},
             {"resolution", Kind::integer, 300, "grid nodes per side"},
             {"include_loops", Kind::boolean, false, "emit loop polylines"}},
            linking_fields()),
       run_separate},
      {"render", "escape-time rasters",
       {map, fiber, {"mode", Kind::string, "fiber", "fiber, parameter or green"},
        {"width", Kind::integer, 600, "pixels"}, {"height", Kind::integer, 600, "pixels"},
        {"depth", Kind::integer, nullptr, "iteration depth (fiber default: generation depth)"},
        {"generation", Kind::integer, 2, "generation for the default fiber depth"},
        {"window", Kind::window, nullptr, "{center, half_width, half_height}; default contains the set"},
        {"image", Kind::string, "", "PPM output path; a .json legend is written beside it"},
        {"isa", Kind::string, "auto", "auto, scalar or avx2"}},
       run_render},
      {"oracle", "backward-orbit estimate of the measure enclosed by a loop",
       {map, {"fiber", Kind::complex, 0.99999, "base point z0"}, loop,
        {"basepoint", Kind::complex, 10.0, "start of the backward orbits"},
        {"depth", Kind::integer, 30, "backward steps"}, {"count", Kind::integer, 100000, "samples"},
        {"seed", Kind::integer, 1, "RNG seed"}, {"discard_tol", Kind::number, 1e-9, "drop samples this close to the loop"},
        {"snap_levels", Kind::integer, 8, "largest n for k/d^n snapping"},
        {"compare_exact", Kind::boolean, true, "also compute the exact linking number"}},
       run_oracle},
      {"selftest", "run the acceptance suite", {{"only", Kind::integers, Json::array(), "criterion ids"}}, run_selftest},
  };
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::validation:
    case ErrorKind::unsupported: return kValidation;
    case ErrorKind::internal: return kInternal;
    default: return kUndetermined;
  }
}

void emit(const Json& j, const std::string& path) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << text;
}

Json error_payload(const std::string& command, const std::string& kind, const std::string& message) {
  return {{"engine_version", engine_version()},
          {"command", command},
          {"status", "error"},
          {"error", {{"kind", kind}, {"message", message}}}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Green currents, fiber Julia sets and exact linking numbers"};
  app.set_version_flag("--version", engine_version());
  app.require_subcommand(1);

  const std::vector<Command> cmds = commands();
  struct Raw {
    std::map<std::string, std::string> values;
    std::map<std::string, std::vector<std::string>> lists;
    std::string job, output;
    std::optional<int> threads;
  };
  std::vector<Raw> raw(cmds.size());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < cmds.size(); ++i) {
    CLI::App* sub = app.add_subcommand(cmds[i].name, cmds[i].help);
    sub->add_option("--job", raw[i].job, "JobSpec JSON file; flags override its fields");
    sub->add_option("-o,--output", raw[i].output, "write the JSON record here instead of stdout");
    sub->add_option("--threads", raw[i].threads, "worker threads (GREENLINKER_THREADS when absent)");
    for (const Field& f : cmds[i].fields) {
      const std::string help = f.help + (f.fallback.is_null() ? "" : " [" + f.fallback.dump() + "]");
      if (f.kind == Kind::points || f.kind == Kind::integers)
        sub->add_option(flag_name(f.name), raw[i].lists[f.name], help);
      else
        sub->add_option(flag_name(f.name), raw[i].values[f.name], help);
    }
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit(error_payload("", "validation", e.what()), "");
    return kValidation;
  }

  std::size_t idx = 0;
  while (idx < subs.size() && !subs[idx]->parsed()) ++idx;
  const Command& cmd = cmds[idx];
  Raw& r = raw[idx];
  CLI::App* sub = subs[idx];

  Json job = Json::object();
  try {
    Json file = Json::object();
    if (!r.job.empty()) {
      file = read_json_file(r.job);
      if (!file.is_object()) throw ValidationError("job file must hold a JSON object");
      if (file.contains("job") && file.at("job").is_object()) file = file.at("job");  // a previous output record
    }
    for (auto it = file.begin(); it != file.end(); ++it) {
      const std::string& k = it.key();
      const bool known = k == "threads" || std::any_of(cmd.fields.begin(), cmd.fields.end(),
                                                       [&](const Field& f) { return f.name == k; });
      if (!known) throw ValidationError("unknown field " + k + " for " + cmd.name);
    }
    for (const Field& f : cmd.fields) {
      Json v = file.contains(f.name) ? file.at(f.name) : f.fallback;
      if (sub->count(flag_name(f.name)) > 0) {
        if (f.kind == Kind::points || f.kind == Kind::integers) {
          v = Json::array();
          for (const auto& s : r.lists[f.name]) v.push_back(s);
        } else if (f.kind == Kind::map) {
          const std::string& s = r.values[f.name];
          v = (!s.empty() && s.front() == '{') ? Json::parse(s) : Json(s);
        } else {
          v = r.values[f.name];
        }
      }
      job[f.name] = normalize(f, v);
    }
    resolve_loop(job);
    std::optional<int> requested = r.threads;
    if (!requested && file.contains("threads")) requested = file.at("threads").get<int>();
    if (requested && *requested < 1) throw ValidationError("--threads must be >= 1");
    job["threads"] = resolve_threads(requested);
  } catch (const Error& e) {
    emit(error_payload(cmd.name, to_string(e.kind()), e.what()), r.output);
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    emit(error_payload(cmd.name, "validation", e.what()), r.output);
    return kValidation;
  }

  Json record{{"engine_version", engine_version()}, {"command", cmd.name}, {"job", job}};
  try {
    const Outcome out = cmd.run(job, job.at("threads").get<int>());
    record["status"] = out.determined ? "ok" : "undetermined";
    record["result"] = out.result;
    emit(record, r.output);
    return out.determined ? kOk : kUndetermined;
  } catch (const Error& e) {
    Json err = error_payload(cmd.name, to_string(e.kind()), e.what());
    err["job"] = job;
    if (const auto* ji = dynamic_cast<const JuliaIntersectionError*>(&e)) {
      err["error"]["parameter"] = ji->parameter();
      err["error"]["point"] = to_json(ji->point());
    } else if (const auto* pr = dynamic_cast<const PerturbationRequiredError*>(&e)) {
      err["error"]["critical_value"] = to_json(pr->critical_value());
    }
    emit(err, r.output);
    return exit_code(e.kind());
  } catch (const Json::exception& e) {
    Json err = error_payload(cmd.name, "validation", e.what());
    err["job"] = job;
    emit(err, r.output);
    return kValidation;
  } catch (const std::exception& e) {
    Json err = error_payload(cmd.name, "internal", e.what());
    err["job"] = job;
    emit(err, r.output);
    return kInternal;
  }
}

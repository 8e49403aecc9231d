#include "greenlinker/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>

#include "greenlinker/contour.hpp"
#include "greenlinker/linking.hpp"
#include "greenlinker/maps.hpp"
#include "greenlinker/measure.hpp"
#include "greenlinker/raster.hpp"

namespace greenlinker {

namespace {

constexpr Cx kQuarterFiber = 0.99999;
constexpr std::uint64_t kSuiteSeed = 20240611;

using Relink = std::function<Mod1Rational(const LinkingOptions&)>;

struct Recorded {
  std::string what;
  Mod1Rational lk;
  Relink relink;
};

// Fiber-loop test case: a map, the fiber, and a box for random loops.
struct FiberCase {
  std::string map;
  Cx z0;
  double half_box;
};

struct Certified {
  std::string map;
  OrientedLoop loop;
  Mod1Rational lk;
};

class Suite {
public:
  explicit Suite(int threads) : threads_(threads), f_(*builtin_map("example-0.3").skew) {}

  CriterionResult run(int id) {
    CriterionResult r;
    r.id = id;
    const auto t0 = std::chrono::steady_clock::now();
    std::ostringstream detail;
    try {
      switch (id) {
        case 1: r.name = "quarter-loop-linking"; r.pass = quarter_loop(detail); break;
        case 2: r.name = "fiber-component-count"; r.pass = component_count(detail); break;
        case 3: r.name = "pushforward-law"; r.pass = pushforward(detail); break;
        case 4: r.name = "lift-law"; r.pass = lift(detail); break;
        case 5: r.name = "sequence-contraction"; r.pass = sequence(detail); break;
        case 6: r.name = "oracle-agreement"; r.pass = oracle(detail); break;
        case 7: r.name = "quadratic-family"; r.pass = quadratic(detail); break;
        case 8: r.name = "rabbit-cubic"; r.pass = rabbit(detail); break;
        case 9: r.name = "functional-equations"; r.pass = functional(detail); break;
        case 10: r.name = "exactness-stability"; r.pass = stability(detail); break;
        default: r.name = "unknown"; detail << "no such criterion";
      }
    } catch (const std::exception& e) {
      r.pass = false;
      detail << " exception: " << e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.detail = detail.str();
    return r;
  }

private:
  int threads_;
  SkewProduct f_;
  std::vector<Recorded> recorded_;
  std::vector<Certified> certified_;
  std::optional<LinkingSequence> sequence_;
  double sequence_seconds_ = 0.0;

  void record(std::string what, Mod1Rational lk, Relink relink) {
    recorded_.push_back({std::move(what), lk, std::move(relink)});
  }

  void record_fiber(const std::string& what, const SkewProduct& f, Cx z0, const OrientedLoop& loop, Mod1Rational lk) {
    record(what, lk, [f, z0, loop](const LinkingOptions& o) {
      return linking_fiber(f, make_fiber_context(f, z0), loop, o).lk;
    });
  }

  // 1. Exact 1/4 for the sector loop, 3/4 reversed, single-threaded under 30 s.
  bool quarter_loop(std::ostringstream& out) {
    const auto t0 = std::chrono::steady_clock::now();
    const FiberContext ctx = make_fiber_context(f_, kQuarterFiber);
    const OrientedLoop loop = quarter_sector_loop(kQuarterFiber);
    const LinkResult fwd = linking_fiber(f_, ctx, loop);
    const LinkResult rev = linking_fiber(f_, ctx, loop.reversed());
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    record_fiber("quarter loop", f_, kQuarterFiber, loop, fwd.lk);
    record_fiber("quarter loop reversed", f_, kQuarterFiber, loop.reversed(), rev.lk);
    out << "lk " << fwd.lk << " (W " << fwd.cert.winding << " at depth " << fwd.cert.depth << "), reversed " << rev.lk
        << ", " << secs << " s";
    return fwd.lk == Mod1Rational(1, 4) && rev.lk == Mod1Rational(3, 4) && fwd.cert.stabilization_checked &&
           rev.cert.stabilization_checked && secs < 30.0;
  }

  // 2. Four bounded components at 600x600 over the default window.
  bool component_count(std::ostringstream& out) {
    const std::optional<int> depth = fiber_generation_depth(f_, kQuarterFiber, 2);
    if (!depth) {
      out << "no escaping critical point";
      return false;
    }
    const Window w = default_fiber_window(f_, kQuarterFiber, *depth);
    const ImageGrid img = render_fiber(f_, kQuarterFiber, w, 600, 600, *depth, threads_);
    const ComponentCount c = count_components(img, kBounded);
    out << "depth " << *depth << ", window " << w.center.real() << "+" << w.center.imag() << "i +-(" << w.half_width
        << ", " << w.half_height << "), components " << c.interior << " (+" << c.boundary << " on the boundary)";
    return c.interior == 4 && c.boundary == 0;
  }

  std::vector<FiberCase> fiber_cases() const {
    return {{"example-0.3", kQuarterFiber, 1.6}, {"example-jonsson", -2.0, 3.5}, {"quadratic:1", 1.0, 2.0}};
  }

  // Random circles certified by the linking engine (JuliaIntersection and
  // non-certification reject a candidate).
  template <class Link>
  std::vector<Certified> random_loops(const std::string& name, std::optional<Cx> fiber, double half_box, Link link,
                                      std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coord(-half_box, half_box), rad(0.05 * half_box, 0.8 * half_box);
    std::vector<Certified> out;
    int nonzero = 0;
    for (int attempt = 0; attempt < 120 && (out.size() < 7 || nonzero < 3); ++attempt) {
      const Cx c(coord(rng), coord(rng));
      const double r = rad(rng);
      const OrientedLoop loop =
          OrientedLoop::circle(c, r, fiber ? Ambient::fiber : Ambient::plane, fiber);
      try {
        const LinkResult lr = link(loop);
        if (!lr.cert.stabilization_checked) continue;
        if (lr.lk.is_zero() && out.size() >= 4) continue;
        if (!lr.lk.is_zero()) ++nonzero;
        out.push_back({name, loop, lr.lk});
      } catch (const JuliaIntersectionError&) {
      } catch (const NotCertifiedError&) {
      }
    }
    return out;
  }

  void ensure_random_loops() {
    if (!certified_.empty()) return;
    std::mt19937_64 rng(kSuiteSeed);
    for (const FiberCase& fc : fiber_cases()) {
      const SkewProduct f = *builtin_map(fc.map).skew;
      const FiberContext ctx = make_fiber_context(f, fc.z0);
      auto loops = random_loops(fc.map, fc.z0, fc.half_box,
                                [&](const OrientedLoop& l) { return linking_fiber(f, ctx, l); }, rng);
      certified_.insert(certified_.end(), loops.begin(), loops.end());
    }
    const Poly1 g = *builtin_map("z2+1").poly;
    auto loops = random_loops("z2+1", std::nullopt, 2.0, [&](const OrientedLoop& l) { return linking_poly_1d(g, l); },
                              rng);
    certified_.insert(certified_.end(), loops.begin(), loops.end());
  }

  // 3. lk(f o gamma) = d lk(gamma) on random certified loops of several maps.
  bool pushforward(std::ostringstream& out) {
    ensure_random_loops();
    int checked = 0, failed = 0, nonzero = 0;
    std::set<std::string> maps;
    for (const Certified& c : certified_) {
      const MapSpec m = builtin_map(c.map);
      Mod1Rational image_lk;
      if (m.kind == MapKind::poly) {
        const OrientedLoop image = push_forward_loop(*m.poly, c.loop);
        image_lk = linking_poly_1d(*m.poly, image).lk;
        const Poly1 g = *m.poly;
        record("pushforward source on " + c.map, c.lk, [g, l = c.loop](const LinkingOptions& o) {
          return linking_poly_1d(g, l, o).lk;
        });
        record("pushforward image on " + c.map, image_lk, [g, image](const LinkingOptions& o) {
          return linking_poly_1d(g, image, o).lk;
        });
      } else {
        const SkewProduct& f = *m.skew;
        const OrientedLoop image = push_forward_loop(f, c.loop);
        const Cx z1 = eval(f.p(), *c.loop.fiber());
        image_lk = linking_fiber(f, make_fiber_context(f, z1), image).lk;
        record_fiber("pushforward source on " + c.map, f, *c.loop.fiber(), c.loop, c.lk);
        record_fiber("pushforward image on " + c.map, f, z1, image, image_lk);
      }
      ++checked;
      maps.insert(c.map);
      if (!c.lk.is_zero()) ++nonzero;
      if (image_lk != c.lk.times(m.degree())) {
        ++failed;
        out << "[" << c.map << ": lk " << c.lk << " image " << image_lk << "] ";
      }
    }
    out << checked << " loops on " << maps.size() << " maps (" << nonzero << " with nonzero lk), " << failed
        << " failures";
    return failed == 0 && checked >= 20 && maps.size() >= 3;
  }

  struct LiftTally {
    int bundles = 0;
    int loops = 0;
    int failed = 0;
  };

  template <class Link>
  void check_bundle(const LiftBundle& b, int d, Mod1Rational source_lk, Link link, LiftTally& t,
                    std::ostringstream& out) {
    ++t.bundles;
    int sum = 0;
    for (const LiftedLoop& l : b.loops) {
      sum += l.covering_degree;
      ++t.loops;
      const Mod1Rational lk = link(l.loop);
      if (lk.times(d) != source_lk.times(l.covering_degree)) {
        ++t.failed;
        out << "[d lk " << lk.times(d) << " != k lk " << source_lk.times(l.covering_degree) << "] ";
      }
    }
    if (sum != d) {
      ++t.failed;
      out << "[sum k = " << sum << "] ";
    }
  }

  // 4. Sum k_i = d and d lk(L_i) = k_i lk(gamma) on every bundle.
  bool lift(std::ostringstream& out) {
    ensure_random_loops();
    LiftTally t;
    auto fiber_bundle = [&](const SkewProduct& f, Cx z0, const OrientedLoop& loop, Mod1Rational lk) {
      const Cx z1 = default_backward_chooser(f.p())(z0);
      const LiftBundle b = lift_loop(f, z1, loop);
      const FiberContext ctx = make_fiber_context(f, z1);
      check_bundle(b, f.degree(), lk, [&](const OrientedLoop& l) {
        const Mod1Rational v = linking_fiber(f, ctx, l).lk;
        record_fiber("lifted loop", f, z1, l, v);
        return v;
      }, t, out);
    };
    {
      // The sector rotated off the real axis, where q_{z1} has its critical value.
      const OrientedLoop loop = quarter_sector_loop(kQuarterFiber, 2.0, 0.01);
      const Mod1Rational lk = linking_fiber(f_, make_fiber_context(f_, kQuarterFiber), loop).lk;
      fiber_bundle(f_, kQuarterFiber, loop, lk);
    }
    {
      const SkewProduct prod = *builtin_map("product").skew;
      const FiberContext ctx = make_fiber_context(prod, 1.0);
      const OrientedLoop big = OrientedLoop::circle(0.0, 4.0, Ambient::fiber, 1.0);
      const OrientedLoop small = OrientedLoop::circle(4.0, 0.5, Ambient::fiber, 1.0);
      const LiftBundle b1 = lift_loop(prod, 1.0, big);
      const LiftBundle b2 = lift_loop(prod, 1.0, small);
      if (b1.loops.size() != 1 || b1.loops[0].covering_degree != 2 || b2.loops.size() != 2) {
        ++t.failed;
        out << "[product-map monodromy] ";
      }
      fiber_bundle(prod, 1.0, big, linking_fiber(prod, ctx, big).lk);
      fiber_bundle(prod, 1.0, small, linking_fiber(prod, ctx, small).lk);
    }
    for (const Certified& c : certified_) {
      const MapSpec m = builtin_map(c.map);
      try {
        if (m.kind == MapKind::poly) {
          const Poly1 g = *m.poly;
          check_bundle(lift_loop(g, c.loop), g.degree(), c.lk, [&](const OrientedLoop& l) {
            return linking_poly_1d(g, l).lk;
          }, t, out);
        } else {
          fiber_bundle(*m.skew, *c.loop.fiber(), c.loop, c.lk);
        }
      } catch (const PerturbationRequiredError&) {
        // A critical value on the loop: no bundle is produced.
      }
    }
    ensure_sequence();
    int seq_checked = 0;
    for (const SequenceStep& s : sequence_->steps) {
      if (s.index == 0) continue;
      ++seq_checked;
      if (!s.pairing_identity) {
        ++t.failed;
        out << "[sequence step " << s.index << " pairing identity] ";
      }
    }
    out << t.bundles << " bundles, " << t.loops << " lifted loops, " << seq_checked << " sequence lifts, " << t.failed
        << " failures";
    return t.failed == 0 && t.bundles >= 5;
  }

  void ensure_sequence() {
    if (sequence_) return;
    const auto t0 = std::chrono::steady_clock::now();
    sequence_ = generate_linking_sequence(f_, kQuarterFiber, quarter_sector_loop(kQuarterFiber), 8);
    sequence_seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }

  // 5. Eight sequence steps: contraction, denominators, distinct values.
  bool sequence(std::ostringstream& out) {
    ensure_sequence();
    const double secs = sequence_seconds_;
    const LinkingSequence& s = *sequence_;
    bool ok = !s.truncated && s.steps.size() == 9 && s.contraction_holds && secs < 300.0;
    std::set<std::pair<std::int64_t, std::int64_t>> seen;
    const Rational p0 = s.steps.empty() ? Rational(0) : s.steps.front().link.pairing;
    Rational last_distance(1);
    for (const SequenceStep& st : s.steps) {
      const int n = st.index;
      const auto pow2 = checked_pow(2, n);
      const auto den_cap = checked_pow(2, n + 2);
      const bool contraction = pow2 && st.link.pairing * Rational(*pow2) <= p0;
      const bool den = den_cap && st.link.lk.denominator_divides(*den_cap);
      const bool distinct = seen.insert({st.link.lk.num(), st.link.lk.den()}).second;
      const Rational dist = st.link.lk.distance_to_zero();
      const bool shrinking = n == 0 || dist < last_distance;
      last_distance = dist;
      ok = ok && contraction && den && distinct && shrinking && !st.link.lk.is_zero();
      out << st.link.lk << (n + 1 < static_cast<int>(s.steps.size()) ? " " : "");
      record_fiber("sequence step " + std::to_string(n), f_, st.base_point, st.loop, st.link.lk);
    }
    out << "; " << secs << " s";
    if (s.truncated) out << "; truncated: " << s.diagnostic;
    return ok;
  }

  // 6. Backward-orbit estimate of the sector loop's mass.
  bool oracle(std::ostringstream& out) {
    const EmpiricalMeasure m = brolin_sample_fiber(f_, kQuarterFiber, 10.0, 30, 100000, kSuiteSeed, threads_);
    const MassEstimate e = estimate_enclosed_mass(m, quarter_sector_loop(kQuarterFiber), 1e-9, threads_);
    const auto snapped = snap_to_dyadic(e.estimate, e.stderr_, 2, 8);
    out << "estimate " << e.estimate << " +- " << e.stderr_ << " (" << e.used << " samples, " << e.discarded
        << " discarded, " << m.failures << " branch retries)";
    if (snapped) out << ", snaps to " << *snapped;
    return std::abs(e.estimate - 0.25) <= 3.0 * e.stderr_ && e.stderr_ < 0.01;
  }

  // 7. Parameters with known Mandelbrot membership.
  bool quadratic(std::ostringstream& out) {
    bool ok = true;
    const std::pair<Cx, QuadraticClass> cases[] = {
        {0.0, QuadraticClass::ball_basins},
        {-1.0, QuadraticClass::ball_basins},
        {Cx(0.0, 0.5), QuadraticClass::ball_basins},
        {0.3, QuadraticClass::infinitely_generated_vertical_basin},
        {1.0, QuadraticClass::infinitely_generated_vertical_basin},
        {-2.1, QuadraticClass::infinitely_generated_vertical_basin},
    };
    for (const auto& [a, want] : cases) {
      const QuadraticClassification q = classify_quadratic_family(a);
      ok = ok && q.cls == want;
      out << "a=" << a.real() << (a.imag() >= 0 ? "+" : "") << a.imag() << "i:" << to_string(q.cls) << " ";
    }
    return ok;
  }

  // 8. The rabbit cubic and its endomorphism lift.
  bool rabbit(std::ostringstream& out) {
    const Poly1 r = *builtin_map("rabbit-cubic").poly;
    const CriticalReport rep = critical_report(r, 2000);
    int escaping = 0, period3 = 0;
    for (const auto& p : rep.points) {
      if (p.fate == CriticalFate::escaping) ++escaping;
      if (p.fate == CriticalFate::attracted && p.period == 3) ++period3;
    }
    const PolyEndo2 endo = builtin_map("rabbit-endo").as_endo();
    const RestrictionAtInfinity ri = restriction_at_infinity(endo);
    const double radius = std::abs(ri.chart_scale) * escape_radius(ri.polynomial);
    SeparationOptions so;
    so.grid = default_grid(0.8 * radius, 400);
    so.threads = threads_;
    const SeparationResult sep = find_separating_loops(endo, default_separation_level(ri.polynomial), so);
    int nonzero3 = 0;
    out << "critical: " << escaping << " escaping, " << period3 << " period-3; contours:";
    for (const auto& l : sep.loops) {
      out << " " << l.link.lk;
      if (!l.link.lk.is_zero() && l.link.lk.denominator_is_power_of(3)) ++nonzero3;
      record("rabbit contour", l.link.lk, [endo, loop = l.loop](const LinkingOptions& o) {
        return linking_at_infinity(endo, loop, o).lk;
      });
    }
    const OrientedLoop all = OrientedLoop::circle(0.0, 1.5 * radius);
    const Mod1Rational all_lk = linking_at_infinity(endo, all).lk;
    record("rabbit enclosing circle", all_lk, [endo, all](const LinkingOptions& o) {
      return linking_at_infinity(endo, all, o).lk;
    });
    out << "; enclosing circle " << all_lk;
    return ri.is_polynomial && rep.points.size() == 2 && escaping == 1 && period3 == 1 && nonzero3 >= 1 &&
           all_lk.is_zero();
  }

  // 9. G(f(x)) = d G(x) within the summed certified bounds.
  bool functional(std::ostringstream& out) {
    std::mt19937_64 rng(kSuiteSeed + 9);
    int checked = 0, failed = 0, maps = 0;
    auto agree = [](const GreenValue& image, const GreenValue& src, int d) {
      const double slack = 1e-12 * (1.0 + std::abs(image.value));  // rounding in the logarithms
      return image.bound.valid && src.bound.valid &&
             std::abs(image.value - d * src.value) <= image.bound.value + d * src.bound.value + slack;
    };
    for (const char* name : {"z2", "z2+1", "rabbit-cubic"}) {
      const Poly1 p = *builtin_map(name).poly;
      const double box = escape_radius(p);
      std::uniform_real_distribution<double> u(-box, box);
      ++maps;
      for (int k = 0; k < 100; ++k) {
        const Cx z(u(rng), u(rng));
        ++checked;
        if (!agree(green_poly(p, eval(p, z)), green_poly(p, z), p.degree())) ++failed;
      }
    }
    for (const char* name : {"example-0.3", "example-jonsson", "product", "cantor-infinity", "rabbit-endo"}) {
      const MapSpec m = builtin_map(name);
      const PolyEndo2& e = m.as_endo();
      const double box = 1.5 * e.bounds().affine_radius;
      std::uniform_real_distribution<double> u(-box, box);
      ++maps;
      for (int k = 0; k < 100; ++k) {
        const Cx z(u(rng), u(rng)), w(u(rng), u(rng));
        const auto [z1, w1] = e.apply_affine(z, w);
        ++checked;
        if (!agree(green_affine(e, z1, w1, {}), green_affine(e, z, w, {}), e.degree())) ++failed;
        if (m.skew) {
          const Poly1& p = m.skew->p();
          ++checked;
          if (!agree(green_poly(p, eval(p, z)), green_poly(p, z), p.degree())) ++failed;
        }
      }
    }
    out << checked << " identities on " << maps << " maps, " << failed << " outside bounds";
    return failed == 0 && checked >= 800;
  }

  // 10. Doubled sampling and one more certification level change nothing.
  bool stability(std::ostringstream& out) {
    if (recorded_.empty()) {
      std::ostringstream ignored;
      quarter_loop(ignored);
    }
    LinkingOptions o;
    o.initial_samples *= 2;
    o.extra_depth += 1;
    int failed = 0;
    for (const Recorded& r : recorded_) {
      const Mod1Rational again = r.relink(o);
      if (again != r.lk) {
        ++failed;
        out << "[" << r.what << ": " << r.lk << " -> " << again << "] ";
      }
    }
    out << recorded_.size() << " linking results recomputed, " << failed << " changed";
    return failed == 0;
  }
};

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts,
                                            const std::function<void(const CriterionResult&)>& on_result) {
  Suite suite(std::max(1, opts.threads));
  std::vector<CriterionResult> results;
  for (int id = 1; id <= 10; ++id) {
    if (!opts.only.empty() && std::find(opts.only.begin(), opts.only.end(), id) == opts.only.end()) continue;
    CriterionResult r = suite.run(id);
    if (on_result) on_result(r);
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_result(const CriterionResult& r) {
  char head[96];
  std::snprintf(head, sizeof head, "%s %2d %s (%.1f s): ", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds);
  return head + r.detail;
}

}  // namespace greenlinker

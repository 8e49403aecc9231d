#include "greenlinker/loop.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace greenlinker {

namespace {

constexpr double kPi = std::numbers::pi;

Cx seg_start(const Segment& s) {
  return std::visit(
      [](const auto& x) -> Cx {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, ArcSegment>)
          return x.start();
        else
          return x.points.front();
      },
      s);
}

Cx seg_end(const Segment& s) {
  return std::visit(
      [](const auto& x) -> Cx {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, ArcSegment>)
          return x.end();
        else
          return x.points.back();
      },
      s);
}

double seg_length(const Segment& s) {
  return std::visit([](const auto& x) { return x.length(); }, s);
}

// Signed angle subtended at p by the edge a -> b, in (-pi, pi].
double edge_angle(Cx a, Cx b, Cx p) {
  const Cx u = a - p, v = b - p;
  const double cross = u.real() * v.imag() - u.imag() * v.real();
  const double dot = u.real() * v.real() + u.imag() * v.imag();
  return std::atan2(cross, dot);
}

double segment_distance(Cx a, Cx b, Cx p) {
  const Cx ab = b - a;
  const double l2 = abs2(ab);
  if (l2 == 0.0) return std::abs(p - a);
  double t = ((p - a) * std::conj(ab)).real() / l2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

double arc_distance(const ArcSegment& arc, Cx p) {
  const Cx rel = p - arc.center;
  const double lo = std::min(arc.from_angle, arc.to_angle);
  const double hi = std::max(arc.from_angle, arc.to_angle);
  if (std::abs(rel) > 0.0) {
    double th = std::arg(rel);
    // Bring th into [lo, lo + 2 pi).
    th = lo + std::fmod(std::fmod(th - lo, 2 * kPi) + 2 * kPi, 2 * kPi);
    if (th <= hi) return std::abs(std::abs(rel) - arc.radius);
  }
  return std::min(std::abs(p - arc.start()), std::abs(p - arc.end()));
}

// Angle swept around p along an arc, exactly: sub-arcs of span <= pi use
// the chord angle plus a full turn when p sits inside the circular segment.
double arc_angle(const ArcSegment& arc, Cx p) {
  const double span = arc.to_angle - arc.from_angle;
  const int pieces = std::max(1, static_cast<int>(std::ceil(std::abs(span) / kPi)));
  double total = 0.0;
  for (int k = 0; k < pieces; ++k) {
    const double t0 = arc.from_angle + span * k / pieces;
    const double t1 = arc.from_angle + span * (k + 1) / pieces;
    const Cx a = arc.point(t0), b = arc.point(t1);
    double ang = edge_angle(a, b, p);
    if (std::abs(p - arc.center) < arc.radius) {
      const Cx ab = b - a, ap = p - a;
      const double cross = ab.real() * ap.imag() - ab.imag() * ap.real();
      const bool ccw = t1 > t0;
      if (ccw && cross < 0.0) ang += 2 * kPi;
      if (!ccw && cross > 0.0) ang -= 2 * kPi;
    }
    total += ang;
  }
  return total;
}

}  // namespace

const char* to_string(Ambient a) noexcept {
  switch (a) {
    case Ambient::fiber: return "fiber";
    case Ambient::plane: return "plane";
    case Ambient::affine_plane: return "affine-plane";
  }
  return "?";
}

double PolylineSegment::length() const {
  double l = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) l += std::abs(points[i] - points[i - 1]);
  return l;
}

OrientedLoop::OrientedLoop(Ambient ambient, std::vector<Segment> segments, std::optional<Cx> fiber)
    : ambient_(ambient), fiber_(fiber), segments_(std::move(segments)) {
  if (segments_.empty()) throw ValidationError("loop has no segments");
  if (ambient_ == Ambient::fiber && !fiber_) throw ValidationError("fiber loop needs a base point");
  double scale = 1.0;
  for (const auto& s : segments_) {
    if (const auto* pl = std::get_if<PolylineSegment>(&s)) {
      if (pl->points.empty()) throw ValidationError("polyline segment has no points");
      for (const Cx& p : pl->points) {
        if (!is_finite(p)) throw ValidationError("loop point is not finite");
        scale = std::max(scale, std::abs(p));
      }
    } else {
      const auto& arc = std::get<ArcSegment>(s);
      if (!is_finite(arc.center) || !std::isfinite(arc.radius) || arc.radius < 0.0 ||
          !std::isfinite(arc.from_angle) || !std::isfinite(arc.to_angle))
        throw ValidationError("arc segment has invalid parameters");
      scale = std::max(scale, std::abs(arc.center) + arc.radius);
    }
  }
  const double tol = kClosureTol * scale;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const Cx e = seg_end(segments_[i]);
    const Cx s = seg_start(segments_[(i + 1) % segments_.size()]);
    if (std::abs(e - s) > tol) throw ValidationError("loop is not closed: segment " + std::to_string(i) + " ends away from the next start");
  }
  edge_cumulative_.resize(segments_.size());
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (const auto* pl = std::get_if<PolylineSegment>(&segments_[i])) {
      auto& cum = edge_cumulative_[i];
      cum.reserve(pl->points.size());
      double l = 0.0;
      cum.push_back(0.0);
      for (std::size_t k = 1; k < pl->points.size(); ++k) {
        l += std::abs(pl->points[k] - pl->points[k - 1]);
        cum.push_back(l);
      }
      length_ += l;
    } else {
      length_ += seg_length(segments_[i]);
    }
    cumulative_.push_back(length_);
  }
  if (!std::isfinite(length_)) throw ValidationError("loop length is not finite");
}

OrientedLoop OrientedLoop::circle(Cx center, double radius, Ambient ambient, std::optional<Cx> fiber) {
  if (!(radius > 0.0)) throw ValidationError("circle radius must be positive");
  return OrientedLoop(ambient, {ArcSegment{center, radius, 0.0, 2 * kPi}}, fiber);
}

OrientedLoop OrientedLoop::point(Cx p, Ambient ambient, std::optional<Cx> fiber) {
  return OrientedLoop(ambient, {PolylineSegment{{p}}}, fiber);
}

OrientedLoop OrientedLoop::polygon(std::vector<Cx> pts, Ambient ambient, std::optional<Cx> fiber) {
  if (pts.empty()) throw ValidationError("polygon needs at least one point");
  if (pts.size() > 1 && pts.front() != pts.back()) pts.push_back(pts.front());
  return OrientedLoop(ambient, {PolylineSegment{std::move(pts)}}, fiber);
}

Cx OrientedLoop::at(double t) const {
  if (length_ == 0.0) return seg_start(segments_.front());
  t -= std::floor(t);
  const double s = t * length_;
  auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), s);
  if (it == cumulative_.end()) --it;
  const std::size_t idx = static_cast<std::size_t>(it - cumulative_.begin());
  const double before = idx == 0 ? 0.0 : cumulative_[idx - 1];
  double local = s - before;
  const Segment& seg = segments_[idx];
  if (const auto* arc = std::get_if<ArcSegment>(&seg)) {
    const double span = arc->to_angle - arc->from_angle;
    const double len = arc->length();
    const double frac = len > 0.0 ? local / len : 0.0;
    return arc->point(arc->from_angle + span * frac);
  }
  const auto& pts = std::get<PolylineSegment>(seg).points;
  if (pts.size() < 2) return pts.front();
  const auto& cum = edge_cumulative_[idx];
  auto e = std::upper_bound(cum.begin() + 1, cum.end() - 1, local);
  const std::size_t i = static_cast<std::size_t>(e - cum.begin());
  const double el = cum[i] - cum[i - 1];
  const double frac = el > 0.0 ? std::clamp((local - cum[i - 1]) / el, 0.0, 1.0) : 0.0;
  return pts[i - 1] + frac * (pts[i] - pts[i - 1]);
}

double OrientedLoop::max_modulus() const {
  double m = 0.0;
  for (const auto& s : segments_) {
    if (const auto* arc = std::get_if<ArcSegment>(&s))
      m = std::max(m, std::abs(arc->center) + arc->radius);
    else
      for (const Cx& p : std::get<PolylineSegment>(s).points) m = std::max(m, std::abs(p));
  }
  return m;
}

Cx OrientedLoop::centroid() const {
  const std::vector<Cx> pts = sample(1024);
  Cx acc{};
  for (const Cx& p : pts) acc += p;
  return acc / static_cast<double>(pts.size());
}

std::vector<Cx> OrientedLoop::sample(int n) const {
  if (n < 1) throw ValidationError("sample count must be positive");
  std::vector<Cx> out;
  out.reserve(static_cast<std::size_t>(n));
  if (length_ == 0.0) {
    out.assign(static_cast<std::size_t>(n), seg_start(segments_.front()));
    return out;
  }
  // Walk the segments once instead of searching per sample.
  std::size_t seg = 0;
  std::size_t edge = 1;
  double seg_base = 0.0, edge_base = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = length_ * i / n;
    while (seg + 1 < segments_.size() && s > cumulative_[seg]) {
      seg_base = cumulative_[seg];
      ++seg;
      edge = 1;
      edge_base = seg_base;
    }
    const Segment& sg = segments_[seg];
    if (const auto* arc = std::get_if<ArcSegment>(&sg)) {
      const double len = arc->length();
      const double frac = len > 0.0 ? (s - seg_base) / len : 0.0;
      out.push_back(arc->point(arc->from_angle + (arc->to_angle - arc->from_angle) * frac));
      continue;
    }
    const auto& pts = std::get<PolylineSegment>(sg).points;
    if (pts.size() == 1) {
      out.push_back(pts.front());
      continue;
    }
    while (edge + 1 < pts.size() && s > edge_base + std::abs(pts[edge] - pts[edge - 1])) {
      edge_base += std::abs(pts[edge] - pts[edge - 1]);
      ++edge;
    }
    const double el = std::abs(pts[edge] - pts[edge - 1]);
    const double frac = el > 0.0 ? std::clamp((s - edge_base) / el, 0.0, 1.0) : 0.0;
    out.push_back(pts[edge - 1] + frac * (pts[edge] - pts[edge - 1]));
  }
  return out;
}

std::vector<Cx> OrientedLoop::flatten(double max_step) const {
  if (!(max_step > 0.0)) throw ValidationError("flatten step must be positive");
  std::vector<Cx> out;
  for (const auto& s : segments_) {
    if (const auto* arc = std::get_if<ArcSegment>(&s)) {
      const int k = std::max(1, static_cast<int>(std::ceil(arc->length() / max_step)));
      const double span = arc->to_angle - arc->from_angle;
      for (int i = 0; i < k; ++i) out.push_back(arc->point(arc->from_angle + span * i / k));
    } else {
      const auto& pts = std::get<PolylineSegment>(s).points;
      for (std::size_t i = 1; i < pts.size(); ++i) {
        const double el = std::abs(pts[i] - pts[i - 1]);
        const int k = std::max(1, static_cast<int>(std::ceil(el / max_step)));
        for (int j = 0; j < k; ++j) out.push_back(pts[i - 1] + (pts[i] - pts[i - 1]) * (static_cast<double>(j) / k));
      }
      if (pts.size() == 1) out.push_back(pts.front());
    }
  }
  return out;
}

OrientedLoop OrientedLoop::reversed() const {
  std::vector<Segment> segs;
  for (auto it = segments_.rbegin(); it != segments_.rend(); ++it) {
    if (const auto* arc = std::get_if<ArcSegment>(&*it)) {
      segs.emplace_back(ArcSegment{arc->center, arc->radius, arc->to_angle, arc->from_angle});
    } else {
      auto pts = std::get<PolylineSegment>(*it).points;
      std::reverse(pts.begin(), pts.end());
      segs.emplace_back(PolylineSegment{std::move(pts)});
    }
  }
  return OrientedLoop(ambient_, std::move(segs), fiber_);
}

OrientedLoop OrientedLoop::transformed(Cx scale, Cx shift) const {
  if (scale == Cx{}) throw ValidationError("loop transform scale must be nonzero");
  const double rot = std::arg(scale);
  std::vector<Segment> segs;
  for (const auto& s : segments_) {
    if (const auto* arc = std::get_if<ArcSegment>(&s)) {
      segs.emplace_back(ArcSegment{scale * arc->center + shift, arc->radius * std::abs(scale), arc->from_angle + rot,
                                   arc->to_angle + rot});
    } else {
      auto pts = std::get<PolylineSegment>(s).points;
      for (Cx& p : pts) p = scale * p + shift;
      segs.emplace_back(PolylineSegment{std::move(pts)});
    }
  }
  // Arc endpoints move by rounding; snap polyline ends onto them.
  for (std::size_t i = 0; i < segs.size(); ++i) {
    auto& next = segs[(i + 1) % segs.size()];
    const Cx e = seg_end(segs[i]);
    if (auto* pl = std::get_if<PolylineSegment>(&next)) pl->points.front() = e;
    if (auto* pl = std::get_if<PolylineSegment>(&segs[i])) {
      if (const auto* arc = std::get_if<ArcSegment>(&next)) pl->points.back() = arc->start();
    }
  }
  return OrientedLoop(ambient_, std::move(segs), fiber_);
}

OrientedLoop OrientedLoop::with_fiber(Ambient ambient, std::optional<Cx> fiber) const {
  return OrientedLoop(ambient, segments_, fiber);
}

double OrientedLoop::distance_to(Cx p) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : segments_) {
    if (const auto* arc = std::get_if<ArcSegment>(&s)) {
      best = std::min(best, arc_distance(*arc, p));
    } else {
      const auto& pts = std::get<PolylineSegment>(s).points;
      if (pts.size() == 1) best = std::min(best, std::abs(p - pts.front()));
      for (std::size_t i = 1; i < pts.size(); ++i) best = std::min(best, segment_distance(pts[i - 1], pts[i], p));
    }
  }
  return best;
}

int OrientedLoop::winding_number(Cx p, double tol) const {
  if (length_ == 0.0) return 0;
  if (distance_to(p) <= tol) throw ValidationError("point lies on the loop");
  double total = 0.0;
  for (const auto& s : segments_) {
    if (const auto* arc = std::get_if<ArcSegment>(&s)) {
      total += arc_angle(*arc, p);
    } else {
      const auto& pts = std::get<PolylineSegment>(s).points;
      for (std::size_t i = 1; i < pts.size(); ++i) total += edge_angle(pts[i - 1], pts[i], p);
    }
  }
  return static_cast<int>(std::lround(total / (2 * kPi)));
}

OrientedLoop concatenate_with_bridge(const OrientedLoop& a, const OrientedLoop& b) {
  if (a.ambient() != b.ambient()) throw ValidationError("cannot join loops in different ambients");
  const Cx a0 = seg_start(a.segments().front());
  const Cx b0 = seg_start(b.segments().front());
  std::vector<Segment> segs(a.segments());
  segs.emplace_back(PolylineSegment{{a0, b0}});
  segs.insert(segs.end(), b.segments().begin(), b.segments().end());
  segs.emplace_back(PolylineSegment{{b0, a0}});
  return OrientedLoop(a.ambient(), std::move(segs), a.fiber());
}

}  // namespace greenlinker

#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "greenlinker/numerics.hpp"

namespace greenlinker {

/// Where a loop lives: a vertical fiber {z = z0}, a one-variable plane (a
/// polynomial's dynamical plane or the chart at infinity), or affine C^2.
enum class Ambient { fiber, plane, affine_plane };

const char* to_string(Ambient a) noexcept;

struct ArcSegment {
  Cx center;
  double radius = 0.0;
  double from_angle = 0.0;
  double to_angle = 0.0;  ///< to - from > 0 is counterclockwise

  Cx point(double angle) const { return center + std::polar(radius, angle); }
  Cx start() const { return point(from_angle); }
  Cx end() const { return point(to_angle); }
  double length() const { return radius * std::abs(to_angle - from_angle); }
};

struct PolylineSegment {
  std::vector<Cx> points;

  double length() const;
};

using Segment = std::variant<ArcSegment, PolylineSegment>;

class OrientedLoop {
public:
  static constexpr double kClosureTol = 1e-12;

  OrientedLoop() = default;
  /// Validates closure (relative to the loop's scale) and non-degeneracy;
  /// a loop of total length zero is accepted as a point loop.
  OrientedLoop(Ambient ambient, std::vector<Segment> segments, std::optional<Cx> fiber = std::nullopt);

  static OrientedLoop circle(Cx center, double radius, Ambient ambient = Ambient::plane,
                             std::optional<Cx> fiber = std::nullopt);
  static OrientedLoop point(Cx p, Ambient ambient = Ambient::plane, std::optional<Cx> fiber = std::nullopt);
  /// Closed polyline through pts (the closing edge is added when needed).
  static OrientedLoop polygon(std::vector<Cx> pts, Ambient ambient = Ambient::plane,
                              std::optional<Cx> fiber = std::nullopt);

  Ambient ambient() const noexcept { return ambient_; }
  const std::optional<Cx>& fiber() const noexcept { return fiber_; }
  const std::vector<Segment>& segments() const noexcept { return segments_; }
  double length() const noexcept { return length_; }
  bool is_point() const noexcept { return length_ == 0.0; }

  /// Arc-length parametrization, t in [0, 1].
  Cx at(double t) const;
  /// Sup of |x| over the loop (arcs bounded by center + radius).
  double max_modulus() const;
  /// Vertex average of a dense sample.
  Cx centroid() const;

  /// Points at t = i / n for i < n.
  std::vector<Cx> sample(int n) const;
  /// Closed polyline vertices (first point not repeated) with spacing <= max_step.
  std::vector<Cx> flatten(double max_step) const;

  OrientedLoop reversed() const;
  /// x -> scale * x + shift applied to every point.
  OrientedLoop transformed(Cx scale, Cx shift) const;
  OrientedLoop scaled_about(Cx c, double factor) const { return transformed(factor, c * (1.0 - factor)); }
  OrientedLoop with_fiber(Ambient ambient, std::optional<Cx> fiber) const;

  double distance_to(Cx p) const;
  /// Exact integer winding number about p. Throws ValidationError when p is
  /// within tol of the loop.
  int winding_number(Cx p, double tol = 1e-12) const;

private:
  Ambient ambient_ = Ambient::plane;
  std::optional<Cx> fiber_;
  std::vector<Segment> segments_;
  std::vector<double> cumulative_;  // arc length at the end of each segment
  std::vector<std::vector<double>> edge_cumulative_;  // per polyline: arc length at each vertex
  double length_ = 0.0;
};

/// Loop joining a and b by a back-and-forth bridge between the two start
/// points; its linking number is lk(a) + lk(b).
OrientedLoop concatenate_with_bridge(const OrientedLoop& a, const OrientedLoop& b);

}  // namespace greenlinker

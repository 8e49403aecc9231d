#pragma once

#include <functional>
#include <string>
#include <vector>

#include "greenlinker/linking.hpp"

namespace greenlinker {

/// Square sampling grid: (resolution + 1)^2 nodes covering
/// center +- half_extent in both directions.
struct GridSpec {
  Cx center;
  double half_extent = 2.0;
  int resolution = 512;

  double step() const { return 2.0 * half_extent / resolution; }
  Cx node(int i, int j) const { return center + Cx(-half_extent + i * step(), -half_extent + j * step()); }
};

/// Closed level curves of a sampled field, each oriented with {value < level}
/// on its left. Open curves that run into the grid boundary are dropped.
struct LevelCurves {
  std::vector<std::vector<Cx>> closed;
  int open = 0;
};

/// values[j * (resolution + 1) + i] is the field at grid.node(i, j). Edge
/// crossings are linear interpolations, or bisections of refine when given.
LevelCurves marching_squares(const std::vector<double>& values, const GridSpec& grid, double level,
                             const std::function<double(Cx)>& refine = {});

struct SeparatingLoop {
  OrientedLoop loop;
  LinkResult link;
};

struct SeparationResult {
  double level = 0.0;
  std::vector<SeparatingLoop> loops;
  int open_contours = 0;
  /// Contours dropped because a vertex or edge midpoint fell below level / 2,
  /// or linking failed.
  int rejected = 0;
  std::vector<std::string> warnings;
};

struct SeparationOptions {
  GridSpec grid;
  LinkingOptions linking;
  int threads = 1;
};

/// Components of {G_g < level} as positively oriented plane loops.
SeparationResult find_separating_loops(const Poly1& g, double level, const SeparationOptions& opts);
/// Same in the fiber over ctx.z0.
SeparationResult find_separating_loops(const SkewProduct& f, const FiberContext& ctx, double level,
                                       const SeparationOptions& opts);
/// Same for the restriction to the line at infinity (in its chart).
SeparationResult find_separating_loops(const PolyEndo2& endo, double level, const SeparationOptions& opts);

/// Three quarters of the smallest d^-k G(c) over escaping critical points c
/// and k < generation, so {G < level} has the generation's pieces; 0.1 when
/// no critical point escapes.
double default_separation_level(const Poly1& g, int generation = 1);
double default_separation_level(const SkewProduct& f, const FiberContext& ctx, int generation = 1);

/// Grid centered at 0 covering the filled set with a 25% margin.
GridSpec default_grid(double radius, int resolution);

}  // namespace greenlinker

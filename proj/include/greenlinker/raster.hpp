#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "greenlinker/kernels.hpp"
#include "greenlinker/skew.hpp"

namespace greenlinker {

/// Rectangle center +- (half_width, half_height).
struct Window {
  Cx center;
  double half_width = 2.0;
  double half_height = 2.0;
};

/// Pixel (i, j) is column i, row j with row 0 at the top; its coordinate is
/// the pixel centre.
struct ImageGrid {
  int width = 0;
  int height = 0;
  Window window;
  std::string mode;
  int depth = 0;
  std::vector<std::uint8_t> labels;
  /// Escape step (fiber, parameter) or potential (green); -1 when none.
  std::vector<double> values;

  Cx pixel(int i, int j) const;
  std::uint8_t label(int i, int j) const { return labels[static_cast<std::size_t>(j) * width + i]; }
};

/// render_fiber labels.
enum FiberLabel : std::uint8_t { kVerticalEscape = 0, kBounded = 1, kFiberUndetermined = 2 };
/// render_parameter_plane labels.
enum ParameterLabel : std::uint8_t { kBallBasins = 0, kInfinitelyGenerated = 1, kParameterUndetermined = 2 };
/// render_green labels.
enum GreenLabel : std::uint8_t { kGreenPositive = 0, kGreenZero = 1, kGreenUndetermined = 2 };

ImageGrid render_fiber(const SkewProduct& f, Cx z0, const Window& window, int width, int height, int depth,
                       int threads = 1, kernels::Isa isa = kernels::active_isa());

/// Depth whose bounded set has 2^(generation) pieces per escaping critical
/// point: the first escape step of a critical point of q_{z0}, plus generation - 1.
std::optional<int> fiber_generation_depth(const SkewProduct& f, Cx z0, int generation);

/// Bounding box of the depth-limited filled fiber set plus 25% on each side.
Window default_fiber_window(const SkewProduct& f, Cx z0, int depth);

ImageGrid render_parameter_plane(const Window& window, int width, int height, int max_iter, int threads = 1,
                                 kernels::Isa isa = kernels::active_isa());

ImageGrid render_green(const SkewProduct& f, Cx z0, const Window& window, int width, int height, int threads = 1);

struct ComponentCount {
  int interior = 0;
  int boundary = 0;  ///< regions touching the window edge, not counted in interior
};

/// 4-connected regions of pixels carrying label.
ComponentCount count_components(const ImageGrid& grid, std::uint8_t label);

/// Binary P6 image with the fixed palette of grid.mode.
void write_ppm(const std::string& path, const ImageGrid& grid);
/// {window, resolution, depth, palette, mode} as JSON text.
std::string sidecar_json(const ImageGrid& grid);

}  // namespace greenlinker

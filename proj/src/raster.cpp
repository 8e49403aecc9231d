#include "greenlinker/raster.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "greenlinker/parallel.hpp"

namespace greenlinker {

Cx ImageGrid::pixel(int i, int j) const {
  const double x = window.center.real() - window.half_width + (i + 0.5) * (2.0 * window.half_width / width);
  const double y = window.center.imag() + window.half_height - (j + 0.5) * (2.0 * window.half_height / height);
  return {x, y};
}

namespace {

ImageGrid blank(const Window& window, int width, int height, const std::string& mode, int depth) {
  if (width < 1 || height < 1) throw ValidationError("image resolution must be at least 1x1");
  if (!(window.half_width > 0.0) || !(window.half_height > 0.0)) throw ValidationError("window extents must be positive");
  ImageGrid g;
  g.width = width;
  g.height = height;
  g.window = window;
  g.mode = mode;
  g.depth = depth;
  const std::size_t n = static_cast<std::size_t>(width) * height;
  g.labels.assign(n, 0);
  g.values.assign(n, -1.0);
  return g;
}

kernels::FiberStepTable step_table(const SkewProduct& f, const FiberContext& ctx, int steps) {
  kernels::FiberStepTable t;
  t.degree = f.degree();
  t.radius = ctx.radius;
  t.steps = steps;
  t.lower.reserve(static_cast<std::size_t>(steps) * t.degree);
  for (int k = 0; k < steps; ++k) {
    const Poly1 q = f.fiber_map(ctx.orbit[static_cast<std::size_t>(k)]);
    for (int j = 0; j < t.degree; ++j) t.lower.push_back(q.coeff(j));
  }
  return t;
}

}  // namespace

ImageGrid render_fiber(const SkewProduct& f, Cx z0, const Window& window, int width, int height, int depth,
                       int threads, kernels::Isa isa) {
  if (depth < 0) throw ValidationError("render depth must be >= 0");
  ImageGrid g = blank(window, width, height, "fiber", depth);
  const FiberContext ctx = make_fiber_context(f, z0, std::max(depth, kDefaultContextDepth));
  if (ctx.base_escapes) {
    // No uniform radius along an escaping base orbit: classify pixel by pixel.
    GreenOptions o;
    o.max_depth = std::max(depth, 1);
    parallel_for(static_cast<std::size_t>(height), threads, [&](std::size_t j) {
      for (int i = 0; i < width; ++i) {
        const GreenValue gv = green_fiber(f, ctx, g.pixel(i, static_cast<int>(j)), o);
        const std::size_t k = j * width + i;
        g.labels[k] = gv.certified_positive() ? kVerticalEscape : kFiberUndetermined;
        g.values[k] = gv.value;
      }
    }, 1);
    return g;
  }
  const kernels::FiberStepTable table = step_table(f, ctx, depth);
  parallel_for(static_cast<std::size_t>(height), threads, [&](std::size_t j) {
    std::vector<Cx> row(static_cast<std::size_t>(width));
    std::vector<int> out(static_cast<std::size_t>(width));
    for (int i = 0; i < width; ++i) row[static_cast<std::size_t>(i)] = g.pixel(i, static_cast<int>(j));
    kernels::fiber_escape_steps(table, row, out, isa);
    for (int i = 0; i < width; ++i) {
      const std::size_t k = j * width + i;
      const int e = out[static_cast<std::size_t>(i)];
      g.labels[k] = e >= 0 ? kVerticalEscape : kBounded;
      g.values[k] = e;
    }
  }, 1);
  return g;
}

std::optional<int> fiber_generation_depth(const SkewProduct& f, Cx z0, int generation) {
  if (generation < 1) throw ValidationError("generation must be >= 1");
  const FiberContext ctx = make_fiber_context(f, z0);
  if (ctx.base_escapes) return std::nullopt;
  const kernels::FiberStepTable table = step_table(f, ctx, ctx.depth());
  const std::vector<Cx> crit = fiber_critical_points(f, z0);
  std::vector<int> out(crit.size());
  kernels::fiber_escape_steps(table, crit, out, kernels::Isa::scalar);
  int first = -1;
  for (int e : out)
    if (e >= 0 && (first < 0 || e < first)) first = e;
  if (first < 0) return std::nullopt;
  return first + generation - 1;
}

Window default_fiber_window(const SkewProduct& f, Cx z0, int depth) {
  const FiberContext ctx = make_fiber_context(f, z0);
  const double r = ctx.radius;
  Window full{0.0, r, r};
  if (ctx.base_escapes) return full;
  constexpr int kProbe = 512;
  const ImageGrid probe = render_fiber(f, z0, full, kProbe, kProbe, depth, 1, kernels::Isa::scalar);
  double x0 = r, x1 = -r, y0 = r, y1 = -r;
  bool any = false;
  for (int j = 0; j < kProbe; ++j)
    for (int i = 0; i < kProbe; ++i)
      if (probe.label(i, j) == kBounded) {
        const Cx p = probe.pixel(i, j);
        x0 = std::min(x0, p.real());
        x1 = std::max(x1, p.real());
        y0 = std::min(y0, p.imag());
        y1 = std::max(y1, p.imag());
        any = true;
      }
  if (!any) return full;
  // Pad by one probe pixel so the box covers the pixel footprints.
  const double px = 2.0 * r / kProbe;
  x0 -= px;
  x1 += px;
  y0 -= px;
  y1 += px;
  Window w;
  w.center = Cx(0.5 * (x0 + x1), 0.5 * (y0 + y1));
  w.half_width = 0.5 * (x1 - x0) * 1.25;
  w.half_height = 0.5 * (y1 - y0) * 1.25;
  return w;
}

ImageGrid render_parameter_plane(const Window& window, int width, int height, int max_iter, int threads,
                                 kernels::Isa isa) {
  if (max_iter < 4) throw ValidationError("max_iter must be >= 4");
  ImageGrid g = blank(window, width, height, "parameter", max_iter);
  const int tail_len = max_iter / 4 + 1;
  parallel_for(static_cast<std::size_t>(height), threads, [&](std::size_t j) {
    std::vector<Cx> a(static_cast<std::size_t>(width));
    std::vector<int> esc(static_cast<std::size_t>(width));
    std::vector<Cx> tails(static_cast<std::size_t>(width) * tail_len);
    for (int i = 0; i < width; ++i) a[static_cast<std::size_t>(i)] = g.pixel(i, static_cast<int>(j));
    kernels::quadratic_orbits(a, max_iter, tail_len, esc, tails, isa);
    for (int i = 0; i < width; ++i) {
      const std::size_t k = j * width + i;
      const int e = esc[static_cast<std::size_t>(i)];
      g.values[k] = e;
      if (e >= 0) {
        g.labels[k] = kInfinitelyGenerated;
      } else {
        const std::span<const Cx> tail(tails.data() + static_cast<std::size_t>(i) * tail_len,
                                       static_cast<std::size_t>(tail_len));
        g.labels[k] = detect_period(tail) > 0 ? kBallBasins : kParameterUndetermined;
      }
    }
  }, 1);
  return g;
}

ImageGrid render_green(const SkewProduct& f, Cx z0, const Window& window, int width, int height, int threads) {
  ImageGrid g = blank(window, width, height, "green", GreenOptions{}.max_depth);
  const FiberContext ctx = make_fiber_context(f, z0);
  parallel_for(static_cast<std::size_t>(height), threads, [&](std::size_t j) {
    for (int i = 0; i < width; ++i) {
      const GreenValue gv = green_fiber(f, ctx, g.pixel(i, static_cast<int>(j)));
      const std::size_t k = j * width + i;
      g.values[k] = gv.value;
      if (gv.certified_positive())
        g.labels[k] = kGreenPositive;
      else if (gv.status == GreenStatus::bounded)
        g.labels[k] = kGreenZero;
      else
        g.labels[k] = kGreenUndetermined;
    }
  }, 1);
  return g;
}

ComponentCount count_components(const ImageGrid& grid, std::uint8_t label) {
  const int w = grid.width, h = grid.height;
  std::vector<int> seen(grid.labels.size(), 0);
  ComponentCount c;
  std::vector<int> stack;
  for (int start = 0; start < w * h; ++start) {
    if (seen[static_cast<std::size_t>(start)] || grid.labels[static_cast<std::size_t>(start)] != label) continue;
    bool touches = false;
    stack.assign(1, start);
    seen[static_cast<std::size_t>(start)] = 1;
    while (!stack.empty()) {
      const int k = stack.back();
      stack.pop_back();
      const int i = k % w, j = k / w;
      if (i == 0 || j == 0 || i == w - 1 || j == h - 1) touches = true;
      const int nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
      for (const auto& q : nb) {
        if (q[0] < 0 || q[1] < 0 || q[0] >= w || q[1] >= h) continue;
        const int m = q[1] * w + q[0];
        if (seen[static_cast<std::size_t>(m)] || grid.labels[static_cast<std::size_t>(m)] != label) continue;
        seen[static_cast<std::size_t>(m)] = 1;
        stack.push_back(m);
      }
    }
    (touches ? c.boundary : c.interior) += 1;
  }
  return c;
}

namespace {

using Rgb = std::array<std::uint8_t, 3>;

struct Palette {
  const char* name;
  std::array<Rgb, 3> colors;
  std::array<const char*, 3> legend;
};

// Light grey for the vertical basin, dark grey for the bounded set.
const Palette kFiberPalette{"fiber-grey", {{{200, 200, 200}, {64, 64, 64}, {200, 30, 30}}},
                            {"vertical-escape", "bounded", "undetermined"}};
const Palette kParameterPalette{"parameter", {{{20, 40, 120}, {235, 235, 235}, {200, 30, 30}}},
                                {"ball-basins", "infinitely-generated-vertical-basin", "undetermined"}};
const Palette kGreenPalette{"green-heat", {{{255, 255, 255}, {0, 0, 0}, {200, 30, 30}}},
                            {"positive", "zero", "undetermined"}};

const Palette& palette_for(const std::string& mode) {
  if (mode == "parameter") return kParameterPalette;
  if (mode == "green") return kGreenPalette;
  return kFiberPalette;
}

}  // namespace

void write_ppm(const std::string& path, const ImageGrid& grid) {
  const Palette& pal = palette_for(grid.mode);
  double vmax = 0.0;
  if (grid.mode == "green")
    for (double v : grid.values) vmax = std::max(vmax, std::log1p(std::max(0.0, v)));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open output image: " + path);
  out << "P6\n" << grid.width << ' ' << grid.height << "\n255\n";
  std::vector<std::uint8_t> row(static_cast<std::size_t>(grid.width) * 3);
  for (int j = 0; j < grid.height; ++j) {
    for (int i = 0; i < grid.width; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * grid.width + i;
      Rgb c = pal.colors[std::min<std::size_t>(grid.labels[k], 2)];
      if (grid.mode == "green" && grid.labels[k] == kGreenPositive && vmax > 0.0) {
        const auto s = static_cast<std::uint8_t>(std::lround(40.0 + 215.0 * std::log1p(grid.values[k]) / vmax));
        c = {s, s, s};
      }
      std::copy(c.begin(), c.end(), row.begin() + static_cast<std::ptrdiff_t>(3 * i));
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw ValidationError("failed writing image: " + path);
}

std::string sidecar_json(const ImageGrid& grid) {
  const Palette& pal = palette_for(grid.mode);
  nlohmann::ordered_json j;
  j["mode"] = grid.mode;
  j["window"] = {{"center", {grid.window.center.real(), grid.window.center.imag()}},
                 {"half_width", grid.window.half_width},
                 {"half_height", grid.window.half_height}};
  j["resolution"] = {grid.width, grid.height};
  j["depth"] = grid.depth;
  nlohmann::ordered_json legend = nlohmann::ordered_json::array();
  for (int k = 0; k < 3; ++k)
    legend.push_back({{"label", k},
                      {"meaning", pal.legend[static_cast<std::size_t>(k)]},
                      {"rgb", {pal.colors[static_cast<std::size_t>(k)][0], pal.colors[static_cast<std::size_t>(k)][1],
                               pal.colors[static_cast<std::size_t>(k)][2]}}});
  j["palette"] = {{"name", pal.name}, {"legend", legend}};
  return j.dump(2);
}

}  // namespace greenlinker

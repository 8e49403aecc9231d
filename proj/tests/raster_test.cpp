#include <doctest.h>

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "greenlinker/maps.hpp"
#include "greenlinker/raster.hpp"

using namespace greenlinker;

TEST_CASE("fiber of example-0.3 has four pieces at the second generation") {
  const SkewProduct f = *builtin_map("example-0.3").skew;
  const auto depth = fiber_generation_depth(f, 0.99999, 2);
  REQUIRE(depth.has_value());
  const Window w = default_fiber_window(f, 0.99999, *depth);
  const ImageGrid img = render_fiber(f, 0.99999, w, 300, 300, *depth);
  const ComponentCount c = count_components(img, kBounded);
  CHECK(c.interior == 4);
  CHECK(c.boundary == 0);
  // One generation earlier: two pieces.
  const ImageGrid first = render_fiber(f, 0.99999, w, 300, 300, *fiber_generation_depth(f, 0.99999, 1));
  CHECK(count_components(first, kBounded).interior == 2);
}

TEST_CASE("render is identical across ISAs and thread counts") {
  const SkewProduct f = *builtin_map("example-jonsson").skew;
  const Window w{0.0, 3.0, 3.0};
  const ImageGrid a = render_fiber(f, -2.0, w, 97, 61, 40, 1, kernels::Isa::scalar);
  const ImageGrid b = render_fiber(f, -2.0, w, 97, 61, 40, 3, kernels::Isa::avx2);
  CHECK(a.labels == b.labels);
  CHECK(a.values == b.values);
  const ImageGrid p = render_parameter_plane(Window{Cx(-0.5, 0.0), 1.6, 1.3}, 80, 64, 300, 1, kernels::Isa::scalar);
  const ImageGrid q = render_parameter_plane(Window{Cx(-0.5, 0.0), 1.6, 1.3}, 80, 64, 300, 2, kernels::Isa::avx2);
  CHECK(p.labels == q.labels);
}

TEST_CASE("parameter plane labels known parameters") {
  // 3x3 image with pixel centres at -1, 0 and 1 along the real axis.
  const ImageGrid p = render_parameter_plane(Window{0.0, 1.5, 1.5}, 3, 3, 500);
  CHECK(p.pixel(1, 1) == Cx(0.0, 0.0));
  CHECK(p.label(1, 1) == kBallBasins);
  CHECK(p.label(0, 1) == kBallBasins);
  CHECK(p.label(2, 1) == kInfinitelyGenerated);
}

TEST_CASE("pixel centres and top row") {
  ImageGrid g;
  g.width = 4;
  g.height = 2;
  g.window = Window{Cx(1.0, 1.0), 2.0, 1.0};
  CHECK(g.pixel(0, 0) == Cx(-0.5, 1.5));
  CHECK(g.pixel(3, 1) == Cx(2.5, 0.5));
}

TEST_CASE("component counting on a synthetic grid") {
  ImageGrid g;
  g.width = 6;
  g.height = 5;
  g.labels = {1, 0, 0, 0, 0, 0,  //
              0, 1, 1, 0, 0, 0,  //
              0, 1, 0, 0, 1, 0,  //
              0, 0, 0, 1, 1, 0,  //
              0, 0, 0, 0, 0, 0};
  const ComponentCount c = count_components(g, 1);
  CHECK(c.interior == 2);
  CHECK(c.boundary == 1);
}

TEST_CASE("green render is zero on the filled set") {
  const SkewProduct f = *builtin_map("product").skew;
  const ImageGrid g = render_green(f, 0.5, Window{0.0, 2.0, 2.0}, 21, 21);
  CHECK(g.label(10, 10) == kGreenZero);
  CHECK(g.label(0, 0) == kGreenPositive);
  CHECK(g.values[0] == doctest::Approx(std::log(std::abs(g.pixel(0, 0)))).epsilon(1e-9));
}

TEST_CASE("PPM output and sidecar") {
  const SkewProduct f = *builtin_map("example-0.3").skew;
  const ImageGrid img = render_fiber(f, 0.99999, Window{0.0, 1.5, 1.5}, 8, 6, 14);
  const std::string path = "raster_test_out.ppm";
  write_ppm(path, img);
  std::ifstream in(path, std::ios::binary);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  CHECK(magic == "P6");
  CHECK(w == 8);
  CHECK(h == 6);
  CHECK(maxval == 255);
  in.get();
  std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(body.size() == 8u * 6u * 3u);
  in.close();
  std::remove(path.c_str());
  const auto side = nlohmann::json::parse(sidecar_json(img));
  CHECK(side.at("mode") == "fiber");
  CHECK(side.at("depth") == 14);
  CHECK(side.at("palette").at("legend").size() == 3);
}

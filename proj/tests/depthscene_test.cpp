#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "graspkit/camera.hpp"
#include "graspkit/depth_image.hpp"
#include "graspkit/height_map.hpp"
#include "graspkit/point_cloud.hpp"
#include "graspkit/synth.hpp"
#include "support/tempdir.hpp"

using namespace graspkit;
using graspkit::testsupport::TempDir;

namespace {

DepthImage constant_image(int w, int h, double d) {
  DepthImage img;
  img.width = w;
  img.height = h;
  img.values.assign(static_cast<std::size_t>(w) * h, d);
  return img;
}

void write_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("pgm16 round trip preserves samples and header") {
  TempDir tmp;
  Pgm16 img;
  img.width = 2;
  img.height = 2;
  img.maxval = 65535;
  img.samples = {1300, 1250, 1300, 1300};
  write_pgm16(img, tmp.file("a.pgm"));
  const Pgm16 back = read_pgm16(tmp.file("a.pgm"));
  CHECK(back.width == 2);
  CHECK(back.height == 2);
  CHECK(back.maxval == 65535);
  CHECK(back.samples == img.samples);
}

TEST_CASE("load_depth scales stored millimeters to meters") {
  TempDir tmp;
  Pgm16 img;
  img.width = 2;
  img.height = 2;
  img.maxval = 65535;
  img.samples = {1300, 1250, 1300, 1300};
  write_pgm16(img, tmp.file("a.pgm"));
  const DepthImage d = load_depth(tmp.file("a.pgm"));
  CHECK(d.width == 2);
  CHECK(d.height == 2);
  CHECK(d.at(0, 0) == doctest::Approx(1.3));
  CHECK(d.at(1, 0) == doctest::Approx(1.25));
  CHECK(d.at(0, 1) == doctest::Approx(1.3));
  CHECK(d.at(1, 1) == doctest::Approx(1.3));
  // Exact storage model: value = stored * 0.001 as a single multiply.
  CHECK(d.at(1, 0) == 1250.0 * 0.001);
}

TEST_CASE("load_depth of a constant full-frame image") {
  TempDir tmp;
  Pgm16 img;
  img.width = 640;
  img.height = 480;
  img.maxval = 65535;
  img.samples.assign(640 * 480, 1300);
  write_pgm16(img, tmp.file("flat.pgm"));
  const DepthImage d = load_depth(tmp.file("flat.pgm"));
  CHECK(d.width == 640);
  CHECK(d.height == 480);
  CHECK(std::all_of(d.values.begin(), d.values.end(),
                    [](double v) { return v == 1300.0 * 0.001; }));
}

TEST_CASE("pgm parser accepts comments and arbitrary header whitespace") {
  TempDir tmp;
  std::string bytes = "P5 # binary graymap\n# another comment\n 2\t1 \n65535\n";
  bytes.push_back(static_cast<char>(0x04));
  bytes.push_back(static_cast<char>(0xE2));  // 1250
  bytes.push_back(static_cast<char>(0x05));
  bytes.push_back(static_cast<char>(0x14));  // 1300
  write_bytes(tmp.file("c.pgm"), bytes);
  const Pgm16 img = read_pgm16(tmp.file("c.pgm"));
  CHECK(img.width == 2);
  CHECK(img.height == 1);
  CHECK(img.samples == std::vector<std::uint16_t>{1250, 1300});
}

TEST_CASE("pgm parser rejects malformed input") {
  TempDir tmp;
  SUBCASE("wrong magic") {
    write_bytes(tmp.file("x.pgm"), "P2\n2 2\n65535\n");
    CHECK_THROWS_AS(read_pgm16(tmp.file("x.pgm")), std::runtime_error);
  }
  SUBCASE("eight-bit maxval") {
    std::string b = "P5\n1 1\n255\n";
    b.push_back('\x05');
    write_bytes(tmp.file("x.pgm"), b);
    CHECK_THROWS_AS(read_pgm16(tmp.file("x.pgm")), std::runtime_error);
  }
  SUBCASE("maxval too large") {
    write_bytes(tmp.file("x.pgm"), "P5\n1 1\n70000\n\x00\x05");
    CHECK_THROWS_AS(read_pgm16(tmp.file("x.pgm")), std::runtime_error);
  }
  SUBCASE("zero dimensions") {
    write_bytes(tmp.file("x.pgm"), "P5\n0 2\n65535\n");
    CHECK_THROWS_AS(read_pgm16(tmp.file("x.pgm")), std::runtime_error);
  }
  SUBCASE("truncated samples") {
    std::string b = "P5\n2 2\n65535\n";
    b += std::string(5, '\x01');  // needs 8 bytes
    write_bytes(tmp.file("x.pgm"), b);
    CHECK_THROWS_AS(read_pgm16(tmp.file("x.pgm")), std::runtime_error);
  }
  SUBCASE("non-numeric dimension") {
    write_bytes(tmp.file("x.pgm"), "P5\ntwo 2\n65535\n");
    CHECK_THROWS_AS(read_pgm16(tmp.file("x.pgm")), std::runtime_error);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(read_pgm16(tmp.file("absent.pgm")), std::runtime_error);
  }
}

TEST_CASE("save_depth_pgm stores invalid pixels as zero and round-trips") {
  TempDir tmp;
  DepthImage img = constant_image(3, 2, 1.3);
  img.at(1, 0) = DepthImage::kInvalid;
  img.at(2, 1) = 0.856;
  save_depth_pgm(img, tmp.file("d.pgm"));
  const DepthImage back = load_depth(tmp.file("d.pgm"));
  CHECK(back.width == 3);
  CHECK(back.height == 2);
  CHECK_FALSE(back.valid(1, 0));
  CHECK(back.at(1, 0) == DepthImage::kInvalid);
  CHECK(back.at(2, 1) == 856.0 * 0.001);
  CHECK(back.at(0, 0) == 1300.0 * 0.001);
  // Out-of-range depth for 16-bit millimeters.
  DepthImage deep = constant_image(1, 1, 70.0);
  CHECK_THROWS_AS(save_depth_pgm(deep, tmp.file("e.pgm")), std::runtime_error);
}

TEST_CASE("load_depth renders a scene-spec json") {
  TempDir tmp;
  SceneSpec spec;
  spec.objects.push_back(Primitive::box(0.0, 0.0, 0.0, 0.10, 0.05, 0.05));
  save_scene(spec, tmp.file("scene.json"));
  const DepthImage d = load_depth(tmp.file("scene.json"));
  const RenderedScene ref = render_scene(spec, default_camera());
  CHECK(d.width == 640);
  CHECK(d.height == 480);
  CHECK(d.values == ref.depth.values);
  CHECK(d.at(320, 240) == doctest::Approx(1.25));
  CHECK(d.at(5, 5) == doctest::Approx(1.3));
}

TEST_CASE("load_depth honors a camera embedded in the scene json") {
  TempDir tmp;
  SceneSpec spec;
  CameraModel cam;
  cam.width = 320;
  cam.height = 240;
  cam.cx = 159.5;
  cam.cy = 119.5;
  spec.camera = cam;
  save_scene(spec, tmp.file("scene.json"));
  const DepthImage d = load_depth(tmp.file("scene.json"));
  CHECK(d.width == 320);
  CHECK(d.height == 240);
}

TEST_CASE("deproject maps the principal point to the optical axis") {
  CameraModel cam;
  cam.fx = 50.0;
  cam.fy = 50.0;
  cam.cx = 10.0;
  cam.cy = 8.0;
  cam.width = 80;
  cam.height = 20;
  DepthImage img = constant_image(80, 20, 1.3);
  img.at(60, 8) = 2.0;  // cx + fx, cy
  const PointCloud pc = deproject(img, cam);
  bool found_axis = false;
  bool found_unit = false;
  for (std::size_t i = 0; i < pc.points.size(); ++i) {
    if (pc.pixel_of[i] == std::make_pair(10, 8)) {
      found_axis = true;
      CHECK(pc.points[i][0] == doctest::Approx(0.0));
      CHECK(pc.points[i][1] == doctest::Approx(0.0));
      CHECK(pc.points[i][2] == doctest::Approx(1.3));
    }
    if (pc.pixel_of[i] == std::make_pair(60, 8)) {
      found_unit = true;
      // One focal length off-axis at depth 2 -> lateral offset = depth.
      CHECK(pc.points[i][0] == doctest::Approx(2.0));
      CHECK(pc.points[i][1] == doctest::Approx(0.0));
      CHECK(pc.points[i][2] == doctest::Approx(2.0));
    }
  }
  CHECK(found_axis);
  CHECK(found_unit);
}

TEST_CASE("deproject skips invalid pixels and keeps pixel_of injective") {
  DepthImage img = constant_image(8, 4, 1.0);
  img.at(3, 1) = DepthImage::kInvalid;
  img.at(7, 3) = DepthImage::kInvalid;
  const PointCloud pc = deproject(img, default_camera());
  CHECK(pc.points.size() == 8 * 4 - 2);
  CHECK(pc.pixel_of.size() == pc.points.size());
  std::set<std::pair<int, int>> seen(pc.pixel_of.begin(), pc.pixel_of.end());
  CHECK(seen.size() == pc.pixel_of.size());
  CHECK(seen.count({3, 1}) == 0);
  CHECK(seen.count({7, 3}) == 0);
}

TEST_CASE("project inverts deproject to the source pixel") {
  SceneSpec spec;
  spec.objects.push_back(Primitive::box(0.05, -0.08, 0.4, 0.12, 0.06, 0.05));
  spec.objects.push_back(Primitive::cylinder(-0.22, 0.10, 0.03, 0.04));
  const CameraModel cam = default_camera();
  const RenderedScene scene = render_scene(spec, cam);
  const PointCloud pc = deproject(scene.depth, cam);
  REQUIRE(pc.points.size() == 640u * 480u);
  for (std::size_t i = 0; i < pc.points.size(); i += 97) {
    const Vec2 px = project(pc.points[i], cam);
    CHECK(std::abs(px.x - pc.pixel_of[i].first) < 1e-9);
    CHECK(std::abs(px.y - pc.pixel_of[i].second) < 1e-9);
    CHECK(pc.points[i][2] ==
          scene.depth.at(pc.pixel_of[i].first, pc.pixel_of[i].second));
  }
}

TEST_CASE("deprojected points lie on the known scene surfaces") {
  SceneSpec spec;
  spec.objects.push_back(Primitive::box(0.0, 0.0, 0.0, 0.10, 0.05, 0.05));
  const CameraModel cam = default_camera();
  const RenderedScene scene = render_scene(spec, cam);
  const PointCloud pc = deproject(scene.depth, cam);
  for (std::size_t i = 0; i < pc.points.size(); i += 53) {
    const double z = pc.points[i][2];
    const bool on_plane = std::abs(z - 1.3) < 1e-9;
    const bool on_box = std::abs(z - 1.25) < 1e-9;
    CHECK((on_plane || on_box));
  }
}

TEST_CASE("estimate_background of a constant image is exact") {
  const DepthImage img = constant_image(20, 20, 1.3);
  const double bg = estimate_background(img, PixelRect{});
  CHECK(bg == 1.3);
}

TEST_CASE("estimate_background ignores objects covering under half the roi") {
  SceneSpec spec;
  // Footprint area ~0.028 m^2 of a ~1.9 m^2 visible workspace.
  spec.objects.push_back(Primitive::box(0.00, 0.00, 0.3, 0.22, 0.09, 0.08));
  spec.objects.push_back(Primitive::cylinder(-0.30, 0.15, 0.05, 0.06));
  const RenderedScene scene = render_scene(spec, default_camera());
  const double bg = estimate_background(scene.depth, PixelRect{});
  CHECK(std::abs(bg - 1.3) <= 0.005);
}

TEST_CASE("estimate_background restricted to an object top finds its depth") {
  SceneSpec spec;
  spec.objects.push_back(Primitive::box(0.0, 0.0, 0.0, 0.20, 0.20, 0.05));
  const RenderedScene scene = render_scene(spec, default_camera());
  // The 0.20 m box spans ~80 px; a 30x30 roi at the image center sits fully
  // on its top face at depth 1.25.
  const double bg =
      estimate_background(scene.depth, PixelRect{305, 225, 30, 30});
  CHECK(std::abs(bg - 1.25) <= 0.005);
}

TEST_CASE("estimate_background requires 100 valid pixels") {
  DepthImage img = constant_image(12, 12, 1.3);  // 144 pixels
  CHECK_NOTHROW(estimate_background(img, PixelRect{}));
  for (int u = 0; u < 12; ++u) {
    for (int v = 0; v < 4; ++v) {
      img.at(u, v) = DepthImage::kInvalid;  // 96 valid remain
    }
  }
  CHECK_THROWS_AS(estimate_background(img, PixelRect{}), std::runtime_error);
  const DepthImage empty = constant_image(5, 5, 1.3);
  CHECK_THROWS_AS(estimate_background(empty, PixelRect{}), std::runtime_error);
}

TEST_CASE("estimate_background rejects a roi outside the image") {
  const DepthImage img = constant_image(20, 20, 1.3);
  CHECK_THROWS_AS(estimate_background(img, PixelRect{10, 10, 20, 20}),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate_background(img, PixelRect{-1, 0, 10, 10}),
                  std::invalid_argument);
}

TEST_CASE("estimate_background is invariant to pixel order") {
  DepthImage img = constant_image(40, 40, 0.0);
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> plane(1.2995, 1.3005);
  std::uniform_real_distribution<double> obj(1.20, 1.28);
  for (auto& v : img.values) {
    v = plane(gen);
  }
  for (std::size_t i = 0; i < img.values.size() * 2 / 5; ++i) {
    img.values[i] = obj(gen);  // 40% arbitrary foreground
  }
  const double bg1 = estimate_background(img, PixelRect{});
  DepthImage shuffled = img;
  std::shuffle(shuffled.values.begin(), shuffled.values.end(), gen);
  const double bg2 = estimate_background(shuffled, PixelRect{});
  CHECK(bg1 == bg2);
  CHECK(std::abs(bg1 - 1.3) <= 0.005);
}

TEST_CASE("adding forty percent foreground leaves the estimate unchanged") {
  DepthImage img = constant_image(40, 40, 1.3);
  const double bare = estimate_background(img, PixelRect{});
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> obj(1.20, 1.28);
  for (std::size_t i = 0; i < img.values.size() * 2 / 5; ++i) {
    img.values[i] = obj(gen);
  }
  const double cluttered = estimate_background(img, PixelRect{});
  CHECK(bare == cluttered);
  CHECK(bare == 1.3);
}

TEST_CASE("height_map flips depth about the background") {
  DepthImage img = constant_image(3, 1, 1.3);
  img.at(1, 0) = 1.25;
  img.at(2, 0) = DepthImage::kInvalid;
  const HeightMap hm = height_map(img, 1.3);
  CHECK(hm.background_depth == 1.3);
  CHECK(hm.at(0, 0) == 0.0);
  CHECK(hm.at(1, 0) == doctest::Approx(0.05));
  CHECK(hm.at(1, 0) == 1.3 - 1.25);  // exact arithmetic convention
  CHECK_FALSE(hm.known(2, 0));
  CHECK(hm.known(0, 0));
}

TEST_CASE("height map of a rendered box matches its physical height") {
  SceneSpec spec;
  spec.objects.push_back(Primitive::box(0.0, 0.0, 0.0, 0.10, 0.05, 0.04));
  const RenderedScene scene = render_scene(spec, default_camera());
  const double bg = estimate_background(scene.depth, PixelRect{});
  const HeightMap hm = height_map(scene.depth, bg);
  CHECK(std::abs(hm.at(320, 240) - 0.04) < 1e-9);
  CHECK(std::abs(hm.at(3, 3)) < 1e-9);
}

TEST_CASE("heights survive the millimeter interchange format bit-exactly") {
  SceneSpec spec;
  spec.objects.push_back(Primitive::box(0.04, -0.02, 0.5, 0.11, 0.05, 0.047));
  spec.objects.push_back(Primitive::sphere(-0.25, 0.12, 0.04));
  const CameraModel cam = default_camera();
  const RenderedScene scene = render_scene(spec, cam);
  TempDir tmp;
  save_depth_pgm(scene.depth, tmp.file("s.pgm"));
  const DepthImage loaded = load_depth(tmp.file("s.pgm"));
  const HeightMap hm = height_map(loaded, 1.3);
  for (int v = 0; v < loaded.height; v += 7) {
    for (int u = 0; u < loaded.width; u += 7) {
      // The analytic height, quantized to the stored millimeter grid.
      const double stored_mm =
          static_cast<double>(std::llround(scene.depth.at(u, v) / 0.001));
      const double expected = 1.3 - stored_mm * 0.001;
      CHECK(hm.at(u, v) == expected);
      CHECK(std::abs(hm.at(u, v) - scene.truth.height_at(u, v)) <
            0.0005 + 1e-12);
    }
  }
}

TEST_CASE("robust_z with window one is a direct lookup") {
  DepthImage img = constant_image(3, 3, 1.3);
  img.at(1, 1) = 1.25;
  img.at(2, 2) = DepthImage::kInvalid;
  const HeightMap hm = height_map(img, 1.3);
  CHECK(robust_z(hm, 1, 1, 1).value() == hm.at(1, 1));
  CHECK(robust_z(hm, 0, 0, 1).value() == 0.0);
  CHECK_FALSE(robust_z(hm, 2, 2, 1).has_value());
}

TEST_CASE("robust_z rejects a single outlier in a 3x3 window") {
  DepthImage img = constant_image(3, 3, 1.3);
  for (auto& v : img.values) {
    v = 1.25;  // height 0.05 everywhere
  }
  img.at(1, 1) = 0.80;  // spurious 0.5 m spike
  const HeightMap hm = height_map(img, 1.3);
  CHECK(robust_z(hm, 1, 1, 3).value() == doctest::Approx(0.05));
}

TEST_CASE("robust_z handles unknowns, borders, and bad arguments") {
  DepthImage img = constant_image(4, 4, 1.25);
  img.at(0, 0) = DepthImage::kInvalid;
  img.at(1, 0) = DepthImage::kInvalid;
  img.at(0, 1) = DepthImage::kInvalid;
  img.at(1, 1) = DepthImage::kInvalid;
  const HeightMap hm = height_map(img, 1.3);
  // Window clipped at the corner covers only the four unknown pixels.
  CHECK_FALSE(robust_z(hm, 0, 0, 1).has_value());
  CHECK_FALSE(robust_z(hm, 0, 0, 3).has_value());
  // One known pixel inside the corner window is enough.
  CHECK(robust_z(hm, 1, 1, 3).value() == doctest::Approx(0.05));
  CHECK_THROWS_AS(robust_z(hm, -1, 0, 3), std::invalid_argument);
  CHECK_THROWS_AS(robust_z(hm, 0, 4, 3), std::invalid_argument);
  CHECK_THROWS_AS(robust_z(hm, 0, 0, 2), std::invalid_argument);
  CHECK_THROWS_AS(robust_z(hm, 0, 0, 0), std::invalid_argument);
}

TEST_CASE("robust_z recovers true heights under sensor noise") {
  SceneSpec spec;
  spec.objects.push_back(Primitive::box(0.0, 0.0, 0.0, 0.14, 0.10, 0.05));
  spec.noise_sigma = 0.003;
  spec.seed = 42;
  const CameraModel cam = default_camera();
  const RenderedScene scene = render_scene(spec, cam);
  const HeightMap hm = height_map(scene.depth, 1.3);
  // Interior box pixels (two pixels in from the edge of the footprint).
  int total = 0;
  int hits = 0;
  for (int v = 0; v < scene.truth.height; ++v) {
    for (int u = 0; u < scene.truth.width; ++u) {
      if (scene.truth.mask_at(u, v) != 0) {
        continue;
      }
      bool interior = true;
      for (int dv = -2; dv <= 2 && interior; ++dv) {
        for (int du = -2; du <= 2 && interior; ++du) {
          if (!scene.truth.in_bounds(u + du, v + dv) ||
              scene.truth.mask_at(u + du, v + dv) != 0) {
            interior = false;
          }
        }
      }
      if (!interior) {
        continue;
      }
      ++total;
      const auto z = robust_z(hm, u, v, 3);
      if (z && std::abs(*z - 0.05) < 0.003) {
        ++hits;
      }
    }
  }
  REQUIRE(total > 500);
  CHECK(static_cast<double>(hits) / total >= 0.95);
}

TEST_CASE("camera model validation and json loading") {
  CHECK_NOTHROW(default_camera().validate());
  CameraModel bad = default_camera();
  bad.fx = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = default_camera();
  bad.camera_height = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = default_camera();
  bad.width = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  TempDir tmp;
  write_bytes(tmp.file("cam.json"),
              R"({"fx": 500.0, "fy": 510.0, "cx": 320.0, "cy": 240.0,
                  "camera_height_m": 1.1, "width": 640, "height": 480})");
  const CameraModel cam = load_camera(tmp.file("cam.json"));
  CHECK(cam.fx == 500.0);
  CHECK(cam.fy == 510.0);
  CHECK(cam.camera_height == 1.1);

  write_bytes(tmp.file("bad.json"), R"({"fx": 500.0})");
  CHECK_THROWS_AS(load_camera(tmp.file("bad.json")), std::runtime_error);
  CHECK_THROWS_AS(load_camera(tmp.file("absent.json")), std::runtime_error);
}

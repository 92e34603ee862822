#include "graspkit/cli.hpp"

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "doctest.h"
#include "graspkit/camera.hpp"
#include "graspkit/depth_image.hpp"
#include "graspkit/pipeline.hpp"
#include "graspkit/synth.hpp"
#include "json.hpp"
#include "support/tempdir.hpp"

using namespace graspkit;
using graspkit::testsupport::TempDir;

namespace {

int run(std::initializer_list<std::string> args) {
  std::vector<std::string> storage{"graspkit"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(storage.size());
  for (const std::string& s : storage) {
    argv.push_back(s.c_str());
  }
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

void write_demo_scene(const std::string& path, int objects) {
  SceneSpec spec;
  if (objects >= 1) {
    spec.objects.push_back(Primitive::box(0.05, 0.02, 0.4, 0.11, 0.045, 0.05));
  }
  if (objects >= 2) {
    spec.objects.push_back(Primitive::cylinder(-0.22, -0.12, 0.026, 0.07));
  }
  save_scene(spec, path);
}

}  // namespace

TEST_CASE("gen renders a scene with its truth sidecars") {
  TempDir tmp;
  write_demo_scene(tmp.file("scene.json"), 2);
  const int rc = run({"gen", "--scene", tmp.file("scene.json"), "--out",
                      tmp.file("depth.pgm")});
  CHECK(rc == 0);
  const DepthImage depth = load_depth(tmp.file("depth.pgm"));
  CHECK(depth.width == 640);
  CHECK(depth.height == 480);

  const std::string truth_json = slurp(tmp.file("depth.truth.json"));
  const auto j = nlohmann::json::parse(truth_json);
  CHECK(j.at("width").get<int>() == 640);
  CHECK(j.contains("mask_rle"));
  CHECK(load_depth(tmp.file("depth.truth.pgm"), 0.0001).width == 640);
}

TEST_CASE("plan writes at most five ranked grasps") {
  TempDir tmp;
  write_demo_scene(tmp.file("scene.json"), 2);
  REQUIRE(run({"gen", "--scene", tmp.file("scene.json"), "--out",
               tmp.file("depth.pgm")}) == 0);
  const int rc = run({"plan", "--depth", tmp.file("depth.pgm"), "--out",
                      tmp.file("grasps.json"), "--overlay",
                      tmp.file("overlay.ppm")});
  CHECK(rc == 0);
  const auto grasps = nlohmann::json::parse(slurp(tmp.file("grasps.json")));
  REQUIRE(grasps.is_array());
  CHECK(!grasps.empty());
  CHECK(grasps.size() <= 5);
  CHECK(grasps.front().at("rank").get<int>() == 1);
  CHECK(grasps.front().at("center_px").size() == 2);
  CHECK(slurp(tmp.file("overlay.ppm")).rfind("P6\n", 0) == 0);
}

TEST_CASE("plan accepts a scene json directly as the depth input") {
  TempDir tmp;
  write_demo_scene(tmp.file("scene.json"), 1);
  const int rc = run({"plan", "--depth", tmp.file("scene.json"), "--out",
                      tmp.file("grasps.json")});
  CHECK(rc == 0);
  const auto grasps = nlohmann::json::parse(slurp(tmp.file("grasps.json")));
  CHECK(!grasps.empty());
}

TEST_CASE("plan on an empty workspace reports no feasible grasp") {
  TempDir tmp;
  write_demo_scene(tmp.file("empty.json"), 0);
  const int rc = run({"plan", "--depth", tmp.file("empty.json"), "--out",
                      tmp.file("grasps.json")});
  CHECK(rc == 0);  // an empty result is a valid outcome, not an error
  const auto grasps = nlohmann::json::parse(slurp(tmp.file("grasps.json")));
  CHECK(grasps.is_array());
  CHECK(grasps.empty());
}

TEST_CASE("plan honors a pipeline config file") {
  TempDir tmp;
  write_demo_scene(tmp.file("scene.json"), 2);
  std::ofstream(tmp.file("cfg.json"))
      << R"({"sampler": {"n_samples": 3000, "seed": 4}, "cluster": {"k": 4}})";
  const int rc = run({"plan", "--depth", tmp.file("scene.json"), "--config",
                      tmp.file("cfg.json"), "--out", tmp.file("grasps.json")});
  CHECK(rc == 0);
  std::ofstream(tmp.file("bad.json")) << R"({"mystery_knob": 1})";
  CHECK(run({"plan", "--depth", tmp.file("scene.json"), "--config",
             tmp.file("bad.json")}) == 2);
}

TEST_CASE("plan output is byte-identical across reruns") {
  TempDir tmp;
  write_demo_scene(tmp.file("scene.json"), 2);
  REQUIRE(run({"plan", "--depth", tmp.file("scene.json"), "--out",
               tmp.file("a.json"), "--overlay", tmp.file("a.ppm")}) == 0);
  REQUIRE(run({"plan", "--depth", tmp.file("scene.json"), "--out",
               tmp.file("b.json"), "--overlay", tmp.file("b.ppm")}) == 0);
  CHECK(slurp(tmp.file("a.json")) == slurp(tmp.file("b.json")));
  CHECK(slurp(tmp.file("a.ppm")) == slurp(tmp.file("b.ppm")));
}

TEST_CASE("bench writes per-scene metrics with a mean row") {
  TempDir tmp;
  std::filesystem::create_directories(tmp.path() / "scenes");
  write_demo_scene(tmp.file("scenes/s1.json"), 1);
  write_demo_scene(tmp.file("scenes/s2.json"), 2);
  std::ofstream(tmp.file("cfg.json"))
      << R"({"sampler": {"n_samples": 4000}, "cluster": {"k": 2}})";
  const int rc = run({"bench", "--scenes", tmp.file("scenes"), "--config",
                      tmp.file("cfg.json"), "--out", tmp.file("m.csv")});
  CHECK(rc == 0);
  const std::string csv = slurp(tmp.file("m.csv"));
  CHECK(csv.rfind("scene,NoT,OP,MT,alpha,beta\n", 0) == 0);
  std::size_t lines = 0;
  for (char c : csv) {
    lines += (c == '\n');
  }
  CHECK(lines == 4);  // header + two scenes + mean
  CHECK(csv.find("s1") != std::string::npos);
  CHECK(csv.find("s2") != std::string::npos);
  CHECK(csv.find("mean") != std::string::npos);

  // Reruns are byte-identical.
  REQUIRE(run({"bench", "--scenes", tmp.file("scenes"), "--config",
               tmp.file("cfg.json"), "--out", tmp.file("m2.csv")}) == 0);
  CHECK(csv == slurp(tmp.file("m2.csv")));
}

TEST_CASE("bench accepts a single scene file") {
  TempDir tmp;
  write_demo_scene(tmp.file("one.json"), 1);
  const int rc =
      run({"bench", "--scenes", tmp.file("one.json"), "--out", tmp.file("m.csv")});
  CHECK(rc == 0);
  const std::string csv = slurp(tmp.file("m.csv"));
  CHECK(csv.rfind("scene,NoT,OP,MT,alpha,beta\n", 0) == 0);
  CHECK(csv.find("mean") != std::string::npos);
}

TEST_CASE("oracle judges a grasp against the analytic scene") {
  TempDir tmp;
  write_demo_scene(tmp.file("scene.json"), 1);
  // A grasp across the box's minor axis at its center.
  const CameraModel cam = default_camera();
  const GraspRect rect =
      rect_at({319.5 + 0.05 * cam.fx / 1.3, 239.5 + 0.02 * cam.fy / 1.3},
              0.4 + kPi / 2.0, GripperModel{}, 1.25, cam);
  nlohmann::json g;
  g["center_px"] = {rect.x_c, rect.y_c};
  g["theta_rad"] = rect.theta;
  g["half_length_px"] = rect.half_length;
  g["half_width_px"] = rect.half_width;
  std::ofstream(tmp.file("grasp.json")) << g.dump();
  CHECK(run({"oracle", "--scene", tmp.file("scene.json"), "--grasp",
             tmp.file("grasp.json")}) == 0);

  // An array input uses its first (top-ranked) entry.
  std::ofstream(tmp.file("list.json")) << nlohmann::json::array({g}).dump();
  CHECK(run({"oracle", "--scene", tmp.file("scene.json"), "--grasp",
             tmp.file("list.json")}) == 0);
}

TEST_CASE("usage errors exit with one") {
  CHECK(run({}) == 1);                       // missing subcommand
  CHECK(run({"plan"}) == 1);                 // missing --depth
  CHECK(run({"frobnicate"}) == 1);           // unknown subcommand
  CHECK(run({"plan", "--bogus", "x"}) == 1); // unknown flag
  CHECK(run({"--help"}) == 0);               // help is not an error
  CHECK(run({"plan", "--help"}) == 0);
}

TEST_CASE("processing errors exit with two") {
  TempDir tmp;
  CHECK(run({"plan", "--depth", tmp.file("missing.pgm")}) == 2);
  std::ofstream(tmp.file("garbage.pgm")) << "not a pgm";
  CHECK(run({"plan", "--depth", tmp.file("garbage.pgm")}) == 2);
  std::filesystem::create_directories(tmp.path() / "empty-dir");
  CHECK(run({"bench", "--scenes", tmp.file("empty-dir")}) == 2);
  write_demo_scene(tmp.file("scene.json"), 1);
  CHECK(run({"oracle", "--scene", tmp.file("scene.json"), "--grasp",
             tmp.file("missing.json")}) == 2);
}

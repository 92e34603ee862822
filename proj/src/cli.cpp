#include "graspkit/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "graspkit/overlay.hpp"
#include "graspkit/pipeline.hpp"

namespace graspkit {
namespace {

CameraModel resolve_camera(const std::string& camera_path,
                           const SceneSpec* spec) {
  if (!camera_path.empty()) return load_camera(camera_path);
  if (spec && spec->camera) return *spec->camera;
  return default_camera();
}

PipelineConfig resolve_config(const std::string& config_path) {
  return config_path.empty() ? PipelineConfig{}
                             : load_pipeline_config(config_path);
}

std::string derived_path(const std::string& out, const char* suffix) {
  const std::string ext = ".pgm";
  if (out.size() > ext.size() &&
      out.compare(out.size() - ext.size(), ext.size(), ext) == 0) {
    return out.substr(0, out.size() - ext.size()) + suffix;
  }
  return out + suffix;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cli: cannot write " + path);
  }
  out << text;
  if (!out) {
    throw std::runtime_error("cli: write failed for " + path);
  }
}

int run_plan(const std::string& depth_path, const std::string& camera_path,
             const std::string& config_path, const std::string& out_path,
             const std::string& overlay_path, double background) {
  PipelineConfig cfg = resolve_config(config_path);
  if (background > 0.0) cfg.background_m = background;

  // A scene-spec depth input also carries the camera to interpret it with.
  SceneSpec spec;
  bool have_spec = false;
  {
    std::ifstream probe(depth_path, std::ios::binary);
    if (!probe) throw std::runtime_error("cli: cannot open " + depth_path);
    int c = probe.get();
    while (c != EOF && std::isspace(c)) c = probe.get();
    have_spec = c == '{';
  }
  if (have_spec) spec = load_scene(depth_path);
  const CameraModel cam = resolve_camera(camera_path, have_spec ? &spec : nullptr);
  const DepthImage img = have_spec ? render_scene(spec, cam).depth
                                   : load_depth(depth_path);

  const PipelineResult result = run_pipeline(img, cam, cfg);

  if (!out_path.empty()) {
    write_text(out_path, grasps_to_json(result).dump(2) + "\n");
  }
  if (!overlay_path.empty()) {
    emit_overlay(img, result, overlay_path);
  }

  std::printf("background: %.4f m\n", result.background_depth);
  std::printf("sampled %d, retained %d (level 1) -> %d (level 2)\n",
              result.sampled_count, result.retained_level1,
              result.retained_level2);
  std::printf("clusters %d, candidates %zu, ranked %zu\n",
              result.clustering.k, result.scores.size(), result.ranked.size());
  if (result.selected) {
    const GdiScore& s = *result.selected;
    std::printf(
        "rank 1: center (%.2f, %.2f) px, theta %.4f rad, "
        "max deviation %.4f m, positive fraction %.3f\n",
        s.rect.x_c, s.rect.y_c, s.rect.theta, s.max_deviation,
        s.positive_fraction);
  } else {
    std::printf("no feasible grasp\n");
  }
  std::printf(
      "timing: total %.1f ms (sample %.1f, filter %.1f, cluster %.1f, "
      "axis %.1f, score %.1f)\n",
      result.timing.total_ms, result.timing.sample_ms, result.timing.filter_ms,
      result.timing.cluster_ms, result.timing.axis_ms, result.timing.score_ms);
  return 0;
}

int run_gen(const std::string& scene_path, const std::string& camera_path,
            const std::string& out_path, std::string truth_path,
            std::string truth_height_path) {
  const SceneSpec spec = load_scene(scene_path);
  const CameraModel cam = resolve_camera(camera_path, &spec);
  const RenderedScene scene = render_scene(spec, cam);

  if (truth_path.empty()) truth_path = derived_path(out_path, ".truth.json");
  if (truth_height_path.empty()) {
    truth_height_path = derived_path(out_path, ".truth.pgm");
  }
  save_depth_pgm(scene.depth, out_path);
  save_truth(scene.truth, truth_path, truth_height_path);

  std::printf("wrote %s (%dx%d), truth %s + %s\n", out_path.c_str(),
              scene.depth.width, scene.depth.height, truth_path.c_str(),
              truth_height_path.c_str());
  return 0;
}

int run_bench(const std::string& scenes_path, const std::string& camera_path,
              const std::string& config_path, const std::string& out_path,
              double max_trial_factor) {
  const PipelineConfig cfg = resolve_config(config_path);

  std::vector<std::string> files;
  if (std::filesystem::is_directory(scenes_path)) {
    for (const auto& entry : std::filesystem::directory_iterator(scenes_path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") {
        files.push_back(entry.path().string());
      }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
      throw std::runtime_error("bench: no .json scenes in " + scenes_path);
    }
  } else {
    files.push_back(scenes_path);
  }

  // Scenes are independent; run them in parallel and emit in name order.
  std::vector<std::future<ExperimentMetrics>> futures;
  futures.reserve(files.size());
  for (const std::string& file : files) {
    futures.push_back(std::async(std::launch::async, [&, file] {
      const SceneSpec spec = load_scene(file);
      const CameraModel cam = resolve_camera(camera_path, &spec);
      return run_experiment(spec, cam, cfg, max_trial_factor).metrics;
    }));
  }

  std::vector<ExperimentMetrics> metrics;
  metrics.reserve(files.size());
  for (auto& f : futures) metrics.push_back(f.get());

  std::string csv = "scene,NoT,OP,MT,alpha,beta\n";
  std::printf("%-32s %5s %5s %5s %9s %9s\n", "scene", "NoT", "OP", "MT",
              "alpha", "beta");
  double sum_not = 0.0, sum_op = 0.0, sum_mt = 0.0, sum_a = 0.0, sum_b = 0.0;
  char row[256];
  for (std::size_t i = 0; i < files.size(); ++i) {
    const ExperimentMetrics& m = metrics[i];
    const std::string name = std::filesystem::path(files[i]).filename().string();
    std::printf("%-32s %5d %5d %5d %9.4f %9.4f\n", name.c_str(), m.trials,
                m.picked, m.trials_used, m.alpha, m.beta);
    std::snprintf(row, sizeof(row), "%s,%d,%d,%d,%.6f,%.6f\n", name.c_str(),
                  m.trials, m.picked, m.trials_used, m.alpha, m.beta);
    csv += row;
    sum_not += m.trials;
    sum_op += m.picked;
    sum_mt += m.trials_used;
    sum_a += m.alpha;
    sum_b += m.beta;
  }
  const double n = static_cast<double>(files.size());
  std::printf("%-32s %5.1f %5.1f %5.1f %9.4f %9.4f\n", "mean", sum_not / n,
              sum_op / n, sum_mt / n, sum_a / n, sum_b / n);
  std::snprintf(row, sizeof(row), "mean,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                sum_not / n, sum_op / n, sum_mt / n, sum_a / n, sum_b / n);
  csv += row;

  if (!out_path.empty()) write_text(out_path, csv);
  return 0;
}

int run_oracle(const std::string& scene_path, const std::string& grasp_path,
               const std::string& camera_path) {
  const SceneSpec spec = load_scene(scene_path);
  const CameraModel cam = resolve_camera(camera_path, &spec);

  std::ifstream in(grasp_path);
  if (!in) throw std::runtime_error("oracle: cannot open " + grasp_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("oracle: malformed JSON in " + grasp_path + ": " +
                             e.what());
  }
  if (j.is_array()) {
    if (j.empty()) throw std::runtime_error("oracle: empty grasp list");
    j = j.front();
  }
  GraspRect rect;
  try {
    rect.x_c = j.at("center_px").at(0).get<double>();
    rect.y_c = j.at("center_px").at(1).get<double>();
    rect.theta = j.at("theta_rad").get<double>();
    rect.half_length = j.at("half_length_px").get<double>();
    rect.half_width = j.at("half_width_px").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("oracle: bad grasp in " + grasp_path + ": " +
                             e.what());
  }

  const RenderedScene scene = render_scene(spec, cam);
  if (!rect_in_bounds(rect, scene.truth.width, scene.truth.height)) {
    throw std::runtime_error("oracle: rectangle outside the image");
  }
  const bool hit = oracle_collision(rect, scene.truth, GripperModel{}, cam);
  std::printf("%s\n", hit ? "collision" : "clear");
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"grasp pose estimation over depth images"};
  app.require_subcommand(1);

  std::string depth_path, camera_path, config_path, out_path, overlay_path;
  double background = 0.0;
  auto* plan = app.add_subcommand(
      "plan", "estimate ranked grasp rectangles for a depth image");
  plan->add_option("--depth", depth_path,
                   "depth input: 16-bit PGM (mm) or scene-spec JSON")
      ->required();
  plan->add_option("--camera", camera_path, "camera intrinsics JSON");
  plan->add_option("--config", config_path, "pipeline config JSON");
  plan->add_option("--out", out_path, "write ranked grasps JSON here");
  plan->add_option("--overlay", overlay_path, "write a PPM visualization here");
  plan->add_option("--background", background,
                   "workspace depth in meters (skips estimation)");

  std::string gen_scene, gen_camera, gen_out, gen_truth, gen_truth_height;
  auto* gen = app.add_subcommand(
      "gen", "render a synthetic scene to a depth PGM with ground truth");
  gen->add_option("--scene", gen_scene, "scene-spec JSON")->required();
  gen->add_option("--camera", gen_camera, "camera intrinsics JSON");
  gen->add_option("--out", gen_out, "output depth PGM path")->required();
  gen->add_option("--truth", gen_truth,
                  "truth JSON path (default: derived from --out)");
  gen->add_option("--truth-height", gen_truth_height,
                  "truth height PGM path (default: derived from --out)");

  std::string bench_scenes, bench_camera, bench_config, bench_out;
  double max_trial_factor = 1.5;
  auto* bench = app.add_subcommand(
      "bench", "run simulated clutter-clearing experiments");
  bench->add_option("--scenes", bench_scenes,
                    "scene-spec JSON file or directory of them")
      ->required();
  bench->add_option("--camera", bench_camera, "camera intrinsics JSON");
  bench->add_option("--config", bench_config, "pipeline config JSON");
  bench->add_option("--out", bench_out, "write the metrics CSV here");
  bench->add_option("--max-trial-factor", max_trial_factor,
                    "trial cap as a multiple of the object count");

  std::string oracle_scene, oracle_grasp, oracle_camera;
  auto* oracle = app.add_subcommand(
      "oracle", "ground-truth collision verdict for a grasp rectangle");
  oracle->add_option("--scene", oracle_scene, "scene-spec JSON")->required();
  oracle->add_option("--grasp", oracle_grasp,
                     "grasp JSON (object or ranked list; first entry is used)")
      ->required();
  oracle->add_option("--camera", oracle_camera, "camera intrinsics JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*plan) {
      return run_plan(depth_path, camera_path, config_path, out_path,
                      overlay_path, background);
    }
    if (*gen) {
      return run_gen(gen_scene, gen_camera, gen_out, gen_truth,
                     gen_truth_height);
    }
    if (*bench) {
      return run_bench(bench_scenes, bench_camera, bench_config, bench_out,
                       max_trial_factor);
    }
    if (*oracle) {
      return run_oracle(oracle_scene, oracle_grasp, oracle_camera);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}

}  // namespace graspkit

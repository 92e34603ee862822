#include "graspkit/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

namespace graspkit {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

void check_keys(const nlohmann::json& j,
                std::initializer_list<const char*> allowed,
                const char* context) {
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
          return key == a;
        }) == allowed.end()) {
      throw std::invalid_argument(std::string("config: unknown key '") + key +
                                  "' in " + context);
    }
  }
}

PixelRect roi_from_json(const nlohmann::json& j) {
  PixelRect r;
  if (j.is_array()) {
    if (j.size() != 4) {
      throw std::invalid_argument("config: roi array must be [x, y, w, h]");
    }
    r.x = j[0].get<int>();
    r.y = j[1].get<int>();
    r.w = j[2].get<int>();
    r.h = j[3].get<int>();
  } else {
    check_keys(j, {"x", "y", "w", "h"}, "sampler.roi");
    r.x = j.at("x").get<int>();
    r.y = j.at("y").get<int>();
    r.w = j.at("w").get<int>();
    r.h = j.at("h").get<int>();
  }
  return r;
}

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("pipeline[") + name + "]: " + e.what());
  }
}

}  // namespace

void PipelineConfig::validate() const {
  if (cluster.k < 1) {
    throw std::invalid_argument("config: cluster.k must be at least 1");
  }
  if (cluster.max_iter < 1 || !(cluster.tol >= 0.0)) {
    throw std::invalid_argument("config: bad k-means iteration limits");
  }
  if (gdi.band_px < 1 || gdi.top_n < 0) {
    throw std::invalid_argument("config: bad gdi parameters");
  }
  if (gdi.z_window < 1 || gdi.z_window % 2 == 0) {
    throw std::invalid_argument("config: gdi.z_window must be odd");
  }
  gripper.validate();
  if (background_m && !(*background_m > 0.0)) {
    throw std::invalid_argument("config: background_m must be positive");
  }
  if (!(background_bin_m > 0.0)) {
    throw std::invalid_argument("config: background_bin_m must be positive");
  }
}

PipelineConfig pipeline_config_from_json(const nlohmann::json& j) {
  PipelineConfig cfg;
  check_keys(j,
             {"sampler", "cluster", "axis_mode", "gdi", "gripper",
              "background_m", "background_bin_m"},
             "config");
  if (j.contains("sampler")) {
    const auto& js = j.at("sampler");
    check_keys(js,
               {"n_samples", "l_v_px", "margin_m", "corner_imbalance_max_m",
                "seed", "roi", "z_window"},
               "sampler");
    cfg.sampler.n_samples = js.value("n_samples", cfg.sampler.n_samples);
    cfg.sampler.l_v = js.value("l_v_px", cfg.sampler.l_v);
    cfg.sampler.margin = js.value("margin_m", cfg.sampler.margin);
    cfg.sampler.corner_imbalance_max =
        js.value("corner_imbalance_max_m", cfg.sampler.corner_imbalance_max);
    cfg.sampler.seed = js.value("seed", cfg.sampler.seed);
    if (js.contains("roi")) cfg.sampler.roi = roi_from_json(js.at("roi"));
    cfg.sampler.z_window = js.value("z_window", cfg.sampler.z_window);
  }
  if (j.contains("cluster")) {
    const auto& jc = j.at("cluster");
    check_keys(jc, {"k", "kmeans_max_iter", "kmeans_tol_px2"}, "cluster");
    cfg.cluster.k = jc.value("k", cfg.cluster.k);
    cfg.cluster.max_iter = jc.value("kmeans_max_iter", cfg.cluster.max_iter);
    cfg.cluster.tol = jc.value("kmeans_tol_px2", cfg.cluster.tol);
  }
  if (j.contains("axis_mode")) {
    const std::string mode = j.at("axis_mode").get<std::string>();
    if (mode == "central_moment") {
      cfg.axis_mode = AxisMode::kCentralMoment;
    } else if (mode == "literal_eq1") {
      cfg.axis_mode = AxisMode::kLiteralEq1;
    } else {
      throw std::invalid_argument("config: unknown axis_mode '" + mode + "'");
    }
  }
  if (j.contains("gdi")) {
    const auto& jg = j.at("gdi");
    check_keys(jg,
               {"band_px", "clearance_min_m", "collision_tol_m", "ranking_mode",
                "top_n", "z_window"},
               "gdi");
    cfg.gdi.band_px = jg.value("band_px", cfg.gdi.band_px);
    cfg.gdi.clearance_min = jg.value("clearance_min_m", cfg.gdi.clearance_min);
    cfg.gdi.collision_tol = jg.value("collision_tol_m", cfg.gdi.collision_tol);
    if (jg.contains("ranking_mode")) {
      const std::string mode = jg.at("ranking_mode").get<std::string>();
      if (mode == "clearance_count") {
        cfg.gdi.ranking_mode = RankingMode::kClearanceCount;
      } else if (mode == "eq2_max") {
        cfg.gdi.ranking_mode = RankingMode::kEq2Max;
      } else {
        throw std::invalid_argument("config: unknown ranking_mode '" + mode +
                                    "'");
      }
    }
    cfg.gdi.top_n = jg.value("top_n", cfg.gdi.top_n);
    cfg.gdi.z_window = jg.value("z_window", cfg.gdi.z_window);
  }
  if (j.contains("gripper")) {
    const auto& jg = j.at("gripper");
    check_keys(jg,
               {"max_opening_m", "finger_thickness_m", "side_clearance_m",
                "opening_fraction"},
               "gripper");
    cfg.gripper.max_opening = jg.value("max_opening_m", cfg.gripper.max_opening);
    cfg.gripper.finger_thickness =
        jg.value("finger_thickness_m", cfg.gripper.finger_thickness);
    cfg.gripper.side_clearance =
        jg.value("side_clearance_m", cfg.gripper.side_clearance);
    cfg.gripper.opening_fraction =
        jg.value("opening_fraction", cfg.gripper.opening_fraction);
  }
  if (j.contains("background_m")) {
    cfg.background_m = j.at("background_m").get<double>();
  }
  cfg.background_bin_m = j.value("background_bin_m", cfg.background_bin_m);
  cfg.validate();
  return cfg;
}

PipelineConfig load_pipeline_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("config: cannot open " + path);
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("config: malformed JSON in " + path + ": " +
                             e.what());
  }
  try {
    return pipeline_config_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("config: bad values in " + path + ": " + e.what());
  }
}

PipelineResult run_pipeline(const DepthImage& img, const CameraModel& cam,
                            const PipelineConfig& cfg) {
  cfg.validate();
  cam.validate();
  const auto t_total = Clock::now();
  PipelineResult result;

  auto t0 = Clock::now();
  const HeightMap hm = stage("depth", [&] {
    const double bg = cfg.background_m
                          ? *cfg.background_m
                          : estimate_background(img, PixelRect{},
                                                cfg.background_bin_m);
    return height_map(img, bg);
  });
  result.background_depth = hm.background_depth;
  const double prep_ms = ms_since(t0);

  t0 = Clock::now();
  SamplerConfig sampler_cfg = cfg.sampler;
  if (sampler_cfg.roi.w == 0) {
    sampler_cfg.roi = PixelRect{0, 0, img.width, img.height};
  }
  const std::vector<LinePose> sampled =
      stage("sample", [&] { return sample_lines(sampler_cfg); });
  result.sampled_count = static_cast<int>(sampled.size());
  result.timing.sample_ms = ms_since(t0);

  t0 = Clock::now();
  const std::vector<LinePose> level1 = stage(
      "filter", [&] { return filter_object_region(sampled, hm, sampler_cfg); });
  result.retained_level1 = static_cast<int>(level1.size());
  result.retained_poses = stage(
      "filter", [&] { return filter_corner_balance(level1, hm, sampler_cfg); });
  result.retained_level2 = static_cast<int>(result.retained_poses.size());
  result.timing.filter_ms = prep_ms + ms_since(t0);

  if (result.retained_poses.empty()) {
    result.timing.total_ms = ms_since(t_total);
    return result;
  }

  t0 = Clock::now();
  std::vector<Vec2> centers;
  centers.reserve(result.retained_poses.size());
  for (const LinePose& p : result.retained_poses) {
    centers.push_back({p.x_c, p.y_c});
  }
  result.clustering = stage("cluster", [&] {
    return kmeans(centers, cfg.cluster.k, cfg.sampler.seed,
                  cfg.cluster.max_iter, cfg.cluster.tol);
  });
  result.families = stage("cluster", [&] {
    return assign_families(result.clustering, result.retained_poses);
  });
  result.timing.cluster_ms = ms_since(t0);

  t0 = Clock::now();
  std::vector<ClusterRect> rects;
  rects.reserve(result.families.size());
  for (const PointFamily& family : result.families) {
    const AxisResult axis =
        stage("axis", [&] { return major_axis(family, cfg.axis_mode); });
    result.axes.push_back(axis);
    if (axis.degenerate) ++result.degenerate_axes;
    rects.push_back(stage("axis", [&] {
      return rect_for_cluster(result.clustering, family, axis, hm, cfg.gripper,
                              cam, cfg.gdi.z_window);
    }));
  }
  result.timing.axis_ms = ms_since(t0);

  t0 = Clock::now();
  for (const ClusterRect& cr : rects) {
    if (!cr.rect) {
      if (cr.out_of_bounds) ++result.dropped_out_of_bounds;
      if (cr.unknown_height) ++result.dropped_unverifiable;
      continue;
    }
    const auto score = stage("score", [&] {
      return gdi_score(*cr.rect, hm, cfg.gdi, cr.cluster_index);
    });
    if (!score) {
      ++result.dropped_unverifiable;
      continue;
    }
    result.scores.push_back(*score);
  }
  result.ranked = stage("score", [&] {
    return rank_grasps(result.scores, cfg.gdi.top_n, cfg.gdi.ranking_mode);
  });
  if (!result.ranked.empty()) {
    result.selected = result.ranked.front().score;
  }
  result.timing.score_ms = ms_since(t0);
  result.timing.total_ms = ms_since(t_total);
  return result;
}

ExperimentMetrics metrics_from_counts(int trials, int picked, int trials_used) {
  if (trials < 1) {
    throw std::invalid_argument("metrics: trials must be positive");
  }
  if (picked < 0 || picked > trials) {
    throw std::invalid_argument("metrics: picked must be in [0, trials]");
  }
  if (trials_used < trials) {
    throw std::invalid_argument("metrics: trials_used must be >= trials");
  }
  ExperimentMetrics m;
  m.trials = trials;
  m.picked = picked;
  m.trials_used = trials_used;
  m.alpha = static_cast<double>(picked) / trials;
  m.beta = static_cast<double>(trials) / trials_used;
  return m;
}

PickResult simulate_pick(SceneSpec& spec, const GraspRect& grasp,
                         const GripperModel& g, const CameraModel& cam,
                         double collision_tol) {
  PickResult result;
  const RenderedScene scene = render_scene(spec, cam);
  const SceneTruth& truth = scene.truth;

  if (!rect_in_bounds(grasp, truth.width, truth.height)) {
    return result;
  }
  if (oracle_collision(grasp, truth, g, cam, collision_tol)) {
    result.collided = true;
    return result;
  }

  const int cu = std::min(
      std::max(static_cast<int>(std::llround(grasp.x_c)), 0), truth.width - 1);
  const int cv = std::min(
      std::max(static_cast<int>(std::llround(grasp.y_c)), 0), truth.height - 1);
  const double palm_depth = truth.plane_depth - truth.height_at(cu, cv);
  const double half_px =
      0.5 * meters_to_pixels(g.opening(), palm_depth, cam);
  const double cos_t = std::cos(grasp.theta);
  const double sin_t = std::sin(grasp.theta);

  // The closing segment must cross exactly one object, and neither fingertip
  // may start on it; then the fingers close around that object alone.
  const int steps = std::max(1, static_cast<int>(std::ceil(2.0 * half_px / 0.25)));
  std::set<int> crossed;
  for (int i = 0; i <= steps; ++i) {
    const double t = -half_px + (2.0 * half_px) * i / steps;
    const int u = static_cast<int>(std::llround(grasp.x_c + t * cos_t));
    const int v = static_cast<int>(std::llround(grasp.y_c + t * sin_t));
    if (!truth.in_bounds(u, v)) return result;
    const int id = truth.mask_at(u, v);
    if (id != SceneTruth::kBackground) crossed.insert(id);
  }
  if (crossed.size() != 1) return result;
  const int target = *crossed.begin();

  for (const double t : {-half_px, half_px}) {
    const int u = static_cast<int>(std::llround(grasp.x_c + t * cos_t));
    const int v = static_cast<int>(std::llround(grasp.y_c + t * sin_t));
    if (truth.mask_at(u, v) == target) return result;
  }

  result.success = true;
  result.object_id = target;
  spec.objects.erase(spec.objects.begin() + target);
  return result;
}

ExperimentResult run_experiment(const SceneSpec& spec, const CameraModel& cam,
                                const PipelineConfig& cfg,
                                double max_trial_factor) {
  if (spec.objects.empty()) {
    throw std::invalid_argument("experiment: scene has no objects");
  }
  if (!(max_trial_factor >= 1.0)) {
    throw std::invalid_argument("experiment: max_trial_factor must be >= 1");
  }
  cfg.validate();

  const int trials = static_cast<int>(spec.objects.size());
  const int cap =
      static_cast<int>(std::ceil(max_trial_factor * static_cast<double>(trials)));

  ExperimentResult out;
  SceneSpec working = spec;
  int picked = 0;
  int used = 0;
  while (!working.objects.empty() && used < cap) {
    PipelineConfig trial_cfg = cfg;
    // A deterministic pipeline would re-propose the identical failing grasp
    // on an unchanged scene; advancing the seed makes each trial a fresh draw.
    trial_cfg.sampler.seed = cfg.sampler.seed + static_cast<std::uint64_t>(used);
    const RenderedScene scene = render_scene(working, cam);
    const PipelineResult plan = run_pipeline(scene.depth, cam, trial_cfg);
    ++used;

    if (!plan.selected) {
      out.picks.push_back(PickResult{});
      continue;
    }
    const PickResult pick =
        simulate_pick(working, plan.selected->rect, cfg.gripper, cam,
                      cfg.gdi.collision_tol);
    if (pick.success) ++picked;
    out.picks.push_back(pick);
  }
  out.metrics = metrics_from_counts(trials, picked, used);
  return out;
}

nlohmann::ordered_json grasps_to_json(const PipelineResult& result) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const RankedGrasp& g : result.ranked) {
    nlohmann::ordered_json j;
    j["rank"] = g.rank;
    j["center_px"] = {g.score.rect.x_c, g.score.rect.y_c};
    j["theta_rad"] = g.score.rect.theta;
    j["half_length_px"] = g.score.rect.half_length;
    j["half_width_px"] = g.score.rect.half_width;
    j["gdi"] = {{"max_deviation_m", g.score.max_deviation},
                {"positive_fraction", g.score.positive_fraction}};
    j["cluster"] = g.cluster_index;
    arr.push_back(j);
  }
  return arr;
}

}  // namespace graspkit

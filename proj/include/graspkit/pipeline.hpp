#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "graspkit/axis.hpp"
#include "graspkit/camera.hpp"
#include "graspkit/cluster.hpp"
#include "graspkit/depth_image.hpp"
#include "graspkit/gdi.hpp"
#include "graspkit/height_map.hpp"
#include "graspkit/sampler.hpp"
#include "graspkit/synth.hpp"

namespace graspkit {

struct PipelineConfig {
  SamplerConfig sampler;
  ClusterConfig cluster;
  AxisMode axis_mode = AxisMode::kCentralMoment;
  GdiConfig gdi;
  GripperModel gripper;
  /// Plane depth override; estimated from the image when absent.
  std::optional<double> background_m;
  double background_bin_m = 0.005;

  void validate() const;
};

PipelineConfig pipeline_config_from_json(const nlohmann::json& j);
PipelineConfig load_pipeline_config(const std::string& path);

struct StageTiming {
  double sample_ms = 0.0;
  double filter_ms = 0.0;
  double cluster_ms = 0.0;
  double axis_ms = 0.0;
  double score_ms = 0.0;
  double total_ms = 0.0;
};

struct PipelineResult {
  double background_depth = 0.0;
  int sampled_count = 0;
  int retained_level1 = 0;
  int retained_level2 = 0;
  std::vector<LinePose> retained_poses;
  Clustering clustering;
  std::vector<PointFamily> families;
  std::vector<AxisResult> axes;
  std::vector<GdiScore> scores;
  int dropped_out_of_bounds = 0;
  int dropped_unverifiable = 0;
  int degenerate_axes = 0;
  std::vector<RankedGrasp> ranked;   // top-N, best first
  std::optional<GdiScore> selected;  // rank 1, if any
  StageTiming timing;
};

/// Runs the full chain: background estimate, line-pose sampling, two-level
/// depth filtering, k-means on retained centers, per-cluster axis fit,
/// rectangle scoring, ranking. Throws std::invalid_argument on bad config.
PipelineResult run_pipeline(const DepthImage& img, const CameraModel& cam,
                            const PipelineConfig& cfg);

/// Accuracy a = picked / trials, efficiency b = trials / trials_used.
struct ExperimentMetrics {
  int trials = 0;       // requested pick attempts
  int picked = 0;       // successful removals
  int trials_used = 0;  // attempts actually spent, including failures
  double alpha = 0.0;
  double beta = 0.0;
};

/// Validates picked <= trials <= trials_used and derives the two ratios.
ExperimentMetrics metrics_from_counts(int trials, int picked, int trials_used);

struct PickResult {
  bool success = false;
  int object_id = SceneTruth::kBackground;  // removed object on success
  bool collided = false;
};

/// Ground-truth pick test: the grasp must be collision-free and its closing
/// segment must cross exactly one object (and neither fingertip may start on
/// it). Success removes that object from the spec.
PickResult simulate_pick(SceneSpec& spec, const GraspRect& grasp,
                         const GripperModel& g, const CameraModel& cam,
                         double collision_tol = 0.015);

struct ExperimentResult {
  ExperimentMetrics metrics;
  std::vector<PickResult> picks;  // one per attempt, in order
};

/// Clears a scene by repeatedly running the pipeline and picking the top
/// grasp. trials = initial object count; attempts are capped at
/// ceil(max_trial_factor * trials). The sampler seed advances each attempt.
ExperimentResult run_experiment(const SceneSpec& spec, const CameraModel& cam,
                                const PipelineConfig& cfg,
                                double max_trial_factor = 1.5);

/// Ranked grasps as a JSON array with fixed field order (rank, center_px,
/// theta_rad, half_length_px, half_width_px, gdi, cluster).
nlohmann::ordered_json grasps_to_json(const PipelineResult& result);

}  // namespace graspkit

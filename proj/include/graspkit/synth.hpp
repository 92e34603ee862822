#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "graspkit/camera.hpp"
#include "graspkit/depth_image.hpp"
#include "graspkit/geometry.hpp"

namespace graspkit {

/// Primitive object resting on the workspace plane. Positions and sizes in
/// workspace meters; (0, 0) is the point under the camera's optical axis.
struct Primitive {
  enum class Kind { kBox, kCylinder, kSphere };

  Kind kind = Kind::kBox;
  double cx = 0.0;
  double cy = 0.0;
  double yaw = 0.0;                      // box only
  double sx = 0.0, sy = 0.0, sz = 0.0;   // box dimensions
  double radius = 0.0;                   // cylinder / sphere
  double height = 0.0;                   // cylinder

  static Primitive box(double cx, double cy, double yaw, double sx, double sy,
                       double sz);
  static Primitive cylinder(double cx, double cy, double radius, double height);
  static Primitive sphere(double cx, double cy, double radius);

  /// Top-surface height at workspace point (x, y); 0 outside the footprint.
  double top_height_at(double x, double y) const;
  /// Footprint bounding box (xmin, ymin, xmax, ymax) in workspace meters.
  std::array<double, 4> footprint_aabb() const;
  /// Throws std::invalid_argument on non-positive sizes.
  void validate() const;
};

struct SceneSpec {
  double plane_depth = 1.3;  // meters from camera to the workspace plane
  std::vector<Primitive> objects;
  double noise_sigma = 0.0;  // meters; Gaussian depth noise, seeded
  std::uint64_t seed = 0;
  std::optional<CameraModel> camera;  // embedded camera for scene dumps
};

/// Ground truth of a rendered scene: per-pixel object id (-1 background) and
/// the noiseless analytic height field.
struct SceneTruth {
  int width = 0;
  int height = 0;
  std::vector<int> object_mask;
  std::vector<double> height_field;
  double plane_depth = 1.3;

  static constexpr int kBackground = -1;

  bool in_bounds(int u, int v) const {
    return u >= 0 && u < width && v >= 0 && v < height;
  }
  int mask_at(int u, int v) const {
    return object_mask[static_cast<std::size_t>(v) * width + u];
  }
  double height_at(int u, int v) const {
    return height_field[static_cast<std::size_t>(v) * width + u];
  }
};

struct RenderedScene {
  DepthImage depth;
  SceneTruth truth;
};

/// Orthographic-at-depth render: each pixel's workspace point is deprojected
/// at plane_depth and reads the highest covering surface. Depth noise is
/// added when noise_sigma > 0 (seeded); the truth stays noiseless. Throws
/// when an object footprint projects outside the image.
RenderedScene render_scene(const SceneSpec& spec, const CameraModel& cam);

/// Ground-truth collision check of the grasp's finger sweep: true iff some
/// object pixel inside either physical finger footprint (the strip from
/// opening/2 to opening/2 + finger_thickness, mapped at palm depth) rises
/// above palm-center height - collision_tol. Reads only the analytic truth,
/// never the pipeline's height map.
bool oracle_collision(const GraspRect& rect, const SceneTruth& truth,
                      const GripperModel& g, const CameraModel& cam,
                      double collision_tol = 0.015);

/// Exhaustive reference search: every rectangle on the stride x angle lattice
/// whose center lies on an object, fits in the image, and is collision-free
/// per oracle_collision. Deterministic (v, u, angle) order. stride >= 1,
/// angles >= 4.
std::vector<GraspRect> oracle_best_grasps(const SceneSpec& spec,
                                          const CameraModel& cam,
                                          const GripperModel& g, int stride,
                                          int angles,
                                          double collision_tol = 0.015);

SceneSpec scene_from_json(const nlohmann::json& j);
nlohmann::ordered_json scene_to_json(const SceneSpec& spec);
SceneSpec load_scene(const std::string& path);
void save_scene(const SceneSpec& spec, const std::string& path);

/// Truth sidecar: JSON with the run-length-encoded mask plus the height
/// field as a 16-bit PGM (0.1 mm units) written next to it.
void save_truth(const SceneTruth& truth, const std::string& json_path,
                const std::string& height_pgm_path);

}  // namespace graspkit

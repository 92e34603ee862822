#pragma once

#include <string>

#include "json.hpp"

namespace graspkit {

/// Pinhole intrinsics of the depth sensor plus its mounting height above the
/// workspace plane. Focal lengths and principal point are in pixels.
struct CameraModel {
  double fx = 525.0;
  double fy = 525.0;
  double cx = 319.5;
  double cy = 239.5;
  double camera_height = 1.3;  // meters above the workspace plane
  int width = 640;
  int height = 480;

  /// Throws std::invalid_argument on non-positive focal lengths, height or
  /// raster dimensions.
  void validate() const;
};

/// Kinect-V1-like 640x480 model at 1.3 m.
CameraModel default_camera();

/// Reads {fx, fy, cx, cy, camera_height_m[, width, height]} from a JSON file.
CameraModel load_camera(const std::string& path);

CameraModel camera_from_json(const nlohmann::json& j);
nlohmann::ordered_json camera_to_json(const CameraModel& cam);

}  // namespace graspkit

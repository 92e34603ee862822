#pragma once

#include <array>
#include <utility>
#include <vector>

#include "graspkit/camera.hpp"
#include "graspkit/depth_image.hpp"
#include "graspkit/geometry.hpp"

namespace graspkit {

/// Camera-frame point cloud with a per-point back-reference to the source
/// pixel. Only valid depth pixels contribute, so pixel_of is injective.
struct PointCloud {
  std::vector<std::array<double, 3>> points;  // (x, y, z) meters
  std::vector<std::pair<int, int>> pixel_of;  // (u, v) per point
};

/// Deprojects every valid pixel:
///   (u, v, d) -> ((u - cx) d / fx, (v - cy) d / fy, d).
PointCloud deproject(const DepthImage& img, const CameraModel& cam);

/// Projects a camera-frame point back to the continuous pixel (u, v).
Vec2 project(const std::array<double, 3>& point, const CameraModel& cam);

}  // namespace graspkit

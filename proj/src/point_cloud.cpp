#include "graspkit/point_cloud.hpp"

namespace graspkit {

PointCloud deproject(const DepthImage& img, const CameraModel& cam) {
  cam.validate();
  PointCloud cloud;
  cloud.points.reserve(img.values.size());
  cloud.pixel_of.reserve(img.values.size());
  for (int v = 0; v < img.height; ++v) {
    for (int u = 0; u < img.width; ++u) {
      if (!img.valid(u, v)) continue;
      const double d = img.at(u, v);
      cloud.points.push_back(
          {(u - cam.cx) * d / cam.fx, (v - cam.cy) * d / cam.fy, d});
      cloud.pixel_of.emplace_back(u, v);
    }
  }
  return cloud;
}

Vec2 project(const std::array<double, 3>& point, const CameraModel& cam) {
  return {cam.cx + point[0] * cam.fx / point[2],
          cam.cy + point[1] * cam.fy / point[2]};
}

}  // namespace graspkit

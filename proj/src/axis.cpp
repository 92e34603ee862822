#include "graspkit/axis.hpp"

#include <cmath>

namespace graspkit {

AxisResult major_axis(const PointFamily& family, AxisMode mode) {
  AxisResult res;
  res.cluster_index = family.cluster_index;
  res.mode = mode;

  bool distinct = false;
  for (std::size_t i = 1; i < family.points.size(); ++i) {
    if (!(family.points[i] == family.points[0])) {
      distinct = true;
      break;
    }
  }
  if (family.points.size() < 2 || !distinct) {
    res.degenerate = true;
    return res;
  }

  double mx = 0.0, my = 0.0;
  for (const Vec2& p : family.points) {
    mx += p.x;
    my += p.y;
  }
  mx /= static_cast<double>(family.points.size());
  my /= static_cast<double>(family.points.size());

  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const Vec2& p : family.points) {
    const double dx = p.x - mx;
    const double dy = p.y - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }

  const double num = 2.0 * sxy;
  const double den = mode == AxisMode::kLiteralEq1 ? sxx + syy : sxx - syy;
  if (std::fabs(num) < 1e-9 && std::fabs(den) < 1e-9) {
    res.degenerate = true;
    return res;
  }
  res.phi = normalize_angle_pi(0.5 * std::atan2(num, den));
  return res;
}

ClusterRect rect_for_cluster(const Clustering& clustering,
                             const PointFamily& family, const AxisResult& axis,
                             const HeightMap& hm, const GripperModel& g,
                             const CameraModel& cam, int z_window) {
  ClusterRect out;
  out.cluster_index = family.cluster_index;
  out.axis_degenerate = axis.degenerate;

  const Vec2 centroid = clustering.centroids[family.cluster_index];
  const int u = std::min(std::max(static_cast<int>(std::llround(centroid.x)), 0),
                         hm.width - 1);
  const int v = std::min(std::max(static_cast<int>(std::llround(centroid.y)), 0),
                         hm.height - 1);
  const auto z = robust_z(hm, u, v, z_window);
  if (!z) {
    out.unknown_height = true;
    return out;
  }
  const double local_depth = hm.background_depth - *z;
  if (!(local_depth > 0.0)) {
    out.unknown_height = true;
    return out;
  }

  // Degenerate axes keep the candidate with a fixed horizontal fallback.
  const GraspRect rect = axis.degenerate
                             ? rect_at(centroid, 0.0, g, local_depth, cam)
                             : build_rect(centroid, axis.phi, g, local_depth, cam);
  if (!rect_in_bounds(rect, hm.width, hm.height)) {
    out.out_of_bounds = true;
    return out;
  }
  out.rect = rect;
  return out;
}

}  // namespace graspkit

#pragma once

#include <optional>

#include "graspkit/cluster.hpp"
#include "graspkit/geometry.hpp"
#include "graspkit/height_map.hpp"

namespace graspkit {

/// How the major-axis angle is computed from a family's second moments about
/// its centroid (dx, dy deviations; Sxy = sum dx*dy etc.):
///   kCentralMoment: 2*phi = atan2(2*Sxy, Sxx - Syy)  (standard orientation)
///   kLiteralEq1:    2*phi = atan2(2*Sxy, Sxx + Syy)  (as-printed variant,
///                   kept selectable for fidelity audits)
enum class AxisMode { kCentralMoment, kLiteralEq1 };

struct AxisResult {
  int cluster_index = -1;
  double phi = 0.0;  // radians in [0, pi)
  AxisMode mode = AxisMode::kCentralMoment;
  bool degenerate = false;
};

/// Major-axis angle of a point family. Degenerate (flag set, phi = 0) when
/// the family has fewer than two distinct points or the selected mode's
/// numerator and denominator are both below 1e-9 px^2 (isotropic family).
AxisResult major_axis(const PointFamily& family,
                      AxisMode mode = AxisMode::kCentralMoment);

/// Grasp-rectangle candidate for one cluster, or the reason it was dropped.
struct ClusterRect {
  int cluster_index = -1;
  std::optional<GraspRect> rect;
  bool axis_degenerate = false;  // rectangle built with the theta = 0 fallback
  bool out_of_bounds = false;
  bool unknown_height = false;   // centroid height unverifiable
};

/// Builds the rectangle at the cluster centroid, perpendicular to phi, with
/// dimensions projected at local_depth = background_depth - robust_z(centroid).
/// Degenerate axes fall back to theta = 0; rectangles leaving the image are
/// dropped with the reason recorded.
ClusterRect rect_for_cluster(const Clustering& clustering,
                             const PointFamily& family, const AxisResult& axis,
                             const HeightMap& hm, const GripperModel& g,
                             const CameraModel& cam, int z_window = 3);

}  // namespace graspkit

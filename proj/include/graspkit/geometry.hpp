#pragma once

#include <array>
#include <utility>

#include "graspkit/camera.hpp"

namespace graspkit {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }

/// Axis-aligned pixel rectangle, {x, y} top-left corner, w x h extent.
struct PixelRect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
};

/// Maps any angle onto [0, pi). Grasp lines and rectangles are
/// orientation-symmetric, so theta and theta + pi denote the same pose.
double normalize_angle_pi(double a);

/// Absolute angular distance between a and b under the [0, pi) symmetry.
double angle_distance_pi(double a, double b);

/// Physical two-finger gripper. Lengths in meters.
struct GripperModel {
  double max_opening = 0.18;
  double finger_thickness = 0.02;
  double side_clearance = 0.02;
  double opening_fraction = 0.5;  // in (0, 1]; the working opening

  double opening() const { return opening_fraction * max_opening; }
  /// Throws std::invalid_argument when a length is non-positive or the
  /// working opening is smaller than the finger itself.
  void validate() const;
};

/// Gripper as a line in the image plane: center (sub-pixel), opening length
/// l_v in pixels, angle theta in [0, pi) from the horizontal axis.
struct LinePose {
  double x_c = 0.0;
  double y_c = 0.0;
  double l_v = 0.0;
  double theta = 0.0;
};

/// The two finger endpoints of a line pose, at +/- l_v/2 along theta.
std::pair<Vec2, Vec2> corners(const LinePose& p);

/// Gripper as a rectangle in the image plane. theta orients the long axis
/// (the opening direction); half_length >= half_width > 0, both in pixels.
struct GraspRect {
  double x_c = 0.0;
  double y_c = 0.0;
  double theta = 0.0;
  double half_length = 0.0;
  double half_width = 0.0;
};

/// Projects a metric length at the given depth onto the image plane using
/// the fx convention (fy differs under anisotropic intrinsics).
double meters_to_pixels(double length_m, double depth_m, const CameraModel& cam);

/// Rectangle centered at `center` with its long axis along `theta`, with
/// dimensions from the physical gripper projected at local_depth.
GraspRect rect_at(Vec2 center, double theta, const GripperModel& g,
                  double local_depth, const CameraModel& cam);

/// Grasp rectangle perpendicular to a cluster's major axis phi
/// (theta = phi + pi/2 mod pi).
GraspRect build_rect(Vec2 centroid, double phi, const GripperModel& g,
                     double local_depth, const CameraModel& cam);

/// The rectangle's four corners, in order (+s+t, +s-t, -s-t, -s+t) where s is
/// the long axis and t the short axis.
std::array<Vec2, 4> rect_corners(const GraspRect& r);

/// True when all four corners lie within [0, width-1] x [0, height-1].
bool rect_in_bounds(const GraspRect& r, int width, int height);

}  // namespace graspkit

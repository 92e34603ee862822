#include "graspkit/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace graspkit {

double normalize_angle_pi(double a) {
  double r = std::fmod(a, kPi);
  if (r < 0.0) r += kPi;
  if (r >= kPi) r = 0.0;  // fmod can land exactly on pi after the shift
  return r;
}

double angle_distance_pi(double a, double b) {
  const double d = std::fabs(normalize_angle_pi(a) - normalize_angle_pi(b));
  return std::min(d, kPi - d);
}

void GripperModel::validate() const {
  if (!(max_opening > 0.0) || !(finger_thickness > 0.0) ||
      !(side_clearance > 0.0)) {
    throw std::invalid_argument("gripper: lengths must be positive");
  }
  if (!(opening_fraction > 0.0) || opening_fraction > 1.0) {
    throw std::invalid_argument("gripper: opening_fraction must be in (0, 1]");
  }
  if (opening() < finger_thickness) {
    throw std::invalid_argument(
        "gripper: working opening smaller than the finger itself");
  }
}

std::pair<Vec2, Vec2> corners(const LinePose& p) {
  const double dx = 0.5 * p.l_v * std::cos(p.theta);
  const double dy = 0.5 * p.l_v * std::sin(p.theta);
  return {Vec2{p.x_c + dx, p.y_c + dy}, Vec2{p.x_c - dx, p.y_c - dy}};
}

double meters_to_pixels(double length_m, double depth_m,
                        const CameraModel& cam) {
  if (!(depth_m > 0.0)) {
    throw std::invalid_argument("meters_to_pixels: depth must be positive");
  }
  return cam.fx * length_m / depth_m;
}

GraspRect rect_at(Vec2 center, double theta, const GripperModel& g,
                  double local_depth, const CameraModel& cam) {
  GraspRect r;
  r.x_c = center.x;
  r.y_c = center.y;
  r.theta = normalize_angle_pi(theta);
  r.half_length =
      meters_to_pixels(0.5 * g.opening() + g.side_clearance, local_depth, cam);
  r.half_width = meters_to_pixels(0.5 * g.finger_thickness + g.side_clearance,
                                  local_depth, cam);
  return r;
}

GraspRect build_rect(Vec2 centroid, double phi, const GripperModel& g,
                     double local_depth, const CameraModel& cam) {
  return rect_at(centroid, phi + 0.5 * kPi, g, local_depth, cam);
}

std::array<Vec2, 4> rect_corners(const GraspRect& r) {
  const Vec2 s{r.half_length * std::cos(r.theta),
               r.half_length * std::sin(r.theta)};
  const Vec2 t{-r.half_width * std::sin(r.theta),
               r.half_width * std::cos(r.theta)};
  const Vec2 c{r.x_c, r.y_c};
  return {c + s + t, c + s - t, c - s - t, c - s + t};
}

bool rect_in_bounds(const GraspRect& r, int width, int height) {
  for (const Vec2& p : rect_corners(r)) {
    if (p.x < 0.0 || p.x > width - 1 || p.y < 0.0 || p.y > height - 1) {
      return false;
    }
  }
  return true;
}

}  // namespace graspkit

#include "graspkit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "graspkit/rng.hpp"

namespace graspkit {

Primitive Primitive::box(double cx, double cy, double yaw, double sx,
                         double sy, double sz) {
  Primitive p;
  p.kind = Kind::kBox;
  p.cx = cx;
  p.cy = cy;
  p.yaw = yaw;
  p.sx = sx;
  p.sy = sy;
  p.sz = sz;
  return p;
}

Primitive Primitive::cylinder(double cx, double cy, double radius,
                              double height) {
  Primitive p;
  p.kind = Kind::kCylinder;
  p.cx = cx;
  p.cy = cy;
  p.radius = radius;
  p.height = height;
  return p;
}

Primitive Primitive::sphere(double cx, double cy, double radius) {
  Primitive p;
  p.kind = Kind::kSphere;
  p.cx = cx;
  p.cy = cy;
  p.radius = radius;
  return p;
}

double Primitive::top_height_at(double x, double y) const {
  const double dx = x - cx;
  const double dy = y - cy;
  switch (kind) {
    case Kind::kBox: {
      const double c = std::cos(yaw);
      const double s = std::sin(yaw);
      const double lx = dx * c + dy * s;
      const double ly = -dx * s + dy * c;
      return (std::fabs(lx) <= 0.5 * sx && std::fabs(ly) <= 0.5 * sy) ? sz
                                                                      : 0.0;
    }
    case Kind::kCylinder:
      return dx * dx + dy * dy <= radius * radius ? height : 0.0;
    case Kind::kSphere: {
      const double d2 = dx * dx + dy * dy;
      if (d2 > radius * radius) return 0.0;
      // Resting on the plane: center sits at z = radius.
      return radius + std::sqrt(radius * radius - d2);
    }
  }
  return 0.0;
}

std::array<double, 4> Primitive::footprint_aabb() const {
  switch (kind) {
    case Kind::kBox: {
      const double c = std::fabs(std::cos(yaw));
      const double s = std::fabs(std::sin(yaw));
      const double ex = 0.5 * (sx * c + sy * s);
      const double ey = 0.5 * (sx * s + sy * c);
      return {cx - ex, cy - ey, cx + ex, cy + ey};
    }
    case Kind::kCylinder:
    case Kind::kSphere:
      return {cx - radius, cy - radius, cx + radius, cy + radius};
  }
  return {cx, cy, cx, cy};
}

void Primitive::validate() const {
  switch (kind) {
    case Kind::kBox:
      if (!(sx > 0.0) || !(sy > 0.0) || !(sz > 0.0)) {
        throw std::invalid_argument("scene: box dimensions must be positive");
      }
      break;
    case Kind::kCylinder:
      if (!(radius > 0.0) || !(height > 0.0)) {
        throw std::invalid_argument(
            "scene: cylinder dimensions must be positive");
      }
      break;
    case Kind::kSphere:
      if (!(radius > 0.0)) {
        throw std::invalid_argument("scene: sphere radius must be positive");
      }
      break;
  }
}

RenderedScene render_scene(const SceneSpec& spec, const CameraModel& cam) {
  cam.validate();
  if (!(spec.plane_depth > 0.0)) {
    throw std::invalid_argument("scene: plane_depth must be positive");
  }
  if (spec.noise_sigma < 0.0) {
    throw std::invalid_argument("scene: noise_sigma must be non-negative");
  }
  for (const Primitive& obj : spec.objects) {
    obj.validate();
    const auto [xmin, ymin, xmax, ymax] = obj.footprint_aabb();
    const double u_min = cam.cx + xmin * cam.fx / spec.plane_depth;
    const double u_max = cam.cx + xmax * cam.fx / spec.plane_depth;
    const double v_min = cam.cy + ymin * cam.fy / spec.plane_depth;
    const double v_max = cam.cy + ymax * cam.fy / spec.plane_depth;
    if (u_min < 0.0 || v_min < 0.0 || u_max > cam.width - 1 ||
        v_max > cam.height - 1) {
      throw std::invalid_argument("scene: object projects outside the image");
    }
  }

  RenderedScene out;
  out.truth.width = cam.width;
  out.truth.height = cam.height;
  out.truth.plane_depth = spec.plane_depth;
  out.truth.object_mask.assign(
      static_cast<std::size_t>(cam.width) * cam.height, SceneTruth::kBackground);
  out.truth.height_field.assign(
      static_cast<std::size_t>(cam.width) * cam.height, 0.0);
  out.depth.width = cam.width;
  out.depth.height = cam.height;
  out.depth.values.assign(out.truth.height_field.size(), spec.plane_depth);

  // Heights pasted onto the plane-depth grid: each pixel's ray is evaluated
  // where it meets the workspace plane, and the tallest covering surface
  // wins. Full perspective ray casting is deliberately out of scope.
  for (int v = 0; v < cam.height; ++v) {
    const double wy = (v - cam.cy) * spec.plane_depth / cam.fy;
    for (int u = 0; u < cam.width; ++u) {
      const double wx = (u - cam.cx) * spec.plane_depth / cam.fx;
      double top = 0.0;
      int id = SceneTruth::kBackground;
      for (std::size_t i = 0; i < spec.objects.size(); ++i) {
        const double h = spec.objects[i].top_height_at(wx, wy);
        if (h > top) {
          top = h;
          id = static_cast<int>(i);
        }
      }
      const std::size_t px = static_cast<std::size_t>(v) * cam.width + u;
      out.truth.object_mask[px] = id;
      out.truth.height_field[px] = top;
      out.depth.values[px] = spec.plane_depth - top;
    }
  }

  if (spec.noise_sigma > 0.0) {
    Rng rng(spec.seed);
    for (double& d : out.depth.values) {
      d += spec.noise_sigma * rng.normal();
    }
  }
  return out;
}

bool oracle_collision(const GraspRect& rect, const SceneTruth& truth,
                      const GripperModel& g, const CameraModel& cam,
                      double collision_tol) {
  g.validate();
  const int cu = std::min(
      std::max(static_cast<int>(std::llround(rect.x_c)), 0), truth.width - 1);
  const int cv = std::min(
      std::max(static_cast<int>(std::llround(rect.y_c)), 0), truth.height - 1);
  const double palm_h = truth.height_at(cu, cv);
  const double palm_depth = truth.plane_depth - palm_h;

  // Physical finger sweep: the strip from opening/2 to opening/2 +
  // finger_thickness on both sides, mapped at palm depth, across the
  // rectangle's short extent. Independent of the pipeline's band config.
  const double s_inner = meters_to_pixels(0.5 * g.opening(), palm_depth, cam);
  const double s_outer =
      s_inner + meters_to_pixels(g.finger_thickness, palm_depth, cam);
  const double cos_t = std::cos(rect.theta);
  const double sin_t = std::sin(rect.theta);

  const double reach = std::hypot(s_outer, rect.half_width) + 1.0;
  const int u0 = std::max(static_cast<int>(std::floor(rect.x_c - reach)), 0);
  const int u1 = std::min(static_cast<int>(std::ceil(rect.x_c + reach)),
                          truth.width - 1);
  const int v0 = std::max(static_cast<int>(std::floor(rect.y_c - reach)), 0);
  const int v1 = std::min(static_cast<int>(std::ceil(rect.y_c + reach)),
                          truth.height - 1);
  for (int v = v0; v <= v1; ++v) {
    for (int u = u0; u <= u1; ++u) {
      if (truth.mask_at(u, v) == SceneTruth::kBackground) continue;
      const double rx = (u + 0.5) - rect.x_c;
      const double ry = (v + 0.5) - rect.y_c;
      const double s = std::fabs(rx * cos_t + ry * sin_t);
      const double t = std::fabs(-rx * sin_t + ry * cos_t);
      if (t > rect.half_width || s < s_inner || s > s_outer) continue;
      if (truth.height_at(u, v) > palm_h - collision_tol) return true;
    }
  }
  return false;
}

std::vector<GraspRect> oracle_best_grasps(const SceneSpec& spec,
                                          const CameraModel& cam,
                                          const GripperModel& g, int stride,
                                          int angles, double collision_tol) {
  if (stride < 1) {
    throw std::invalid_argument("oracle: stride must be at least 1");
  }
  if (angles < 4) {
    throw std::invalid_argument("oracle: need at least 4 angles");
  }
  const RenderedScene scene = render_scene(spec, cam);
  const SceneTruth& truth = scene.truth;

  std::vector<GraspRect> grasps;
  for (int v = 0; v < truth.height; v += stride) {
    for (int u = 0; u < truth.width; u += stride) {
      if (truth.mask_at(u, v) == SceneTruth::kBackground) continue;
      const double local_depth = truth.plane_depth - truth.height_at(u, v);
      for (int a = 0; a < angles; ++a) {
        const double theta = kPi * a / angles;
        const GraspRect rect = rect_at({static_cast<double>(u),
                                        static_cast<double>(v)},
                                       theta, g, local_depth, cam);
        if (!rect_in_bounds(rect, truth.width, truth.height)) continue;
        if (oracle_collision(rect, truth, g, cam, collision_tol)) continue;
        grasps.push_back(rect);
      }
    }
  }
  return grasps;
}

SceneSpec scene_from_json(const nlohmann::json& j) {
  SceneSpec spec;
  spec.plane_depth = j.value("plane_depth", 1.3);
  spec.noise_sigma = j.value("noise_sigma", 0.0);
  spec.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("camera")) {
    spec.camera = camera_from_json(j.at("camera"));
  }
  if (j.contains("objects")) {
    for (const auto& jo : j.at("objects")) {
      const std::string kind = jo.at("kind").get<std::string>();
      Primitive p;
      if (kind == "box") {
        p = Primitive::box(jo.at("cx").get<double>(), jo.at("cy").get<double>(),
                           jo.value("yaw", 0.0), jo.at("sx").get<double>(),
                           jo.at("sy").get<double>(), jo.at("sz").get<double>());
      } else if (kind == "cylinder") {
        p = Primitive::cylinder(
            jo.at("cx").get<double>(), jo.at("cy").get<double>(),
            jo.at("radius").get<double>(), jo.at("height").get<double>());
      } else if (kind == "sphere") {
        p = Primitive::sphere(jo.at("cx").get<double>(),
                              jo.at("cy").get<double>(),
                              jo.at("radius").get<double>());
      } else {
        throw std::runtime_error("scene: unknown primitive kind '" + kind + "'");
      }
      p.validate();
      spec.objects.push_back(p);
    }
  }
  return spec;
}

nlohmann::ordered_json scene_to_json(const SceneSpec& spec) {
  nlohmann::ordered_json j;
  j["plane_depth"] = spec.plane_depth;
  j["noise_sigma"] = spec.noise_sigma;
  j["seed"] = spec.seed;
  if (spec.camera) j["camera"] = camera_to_json(*spec.camera);
  j["objects"] = nlohmann::ordered_json::array();
  for (const Primitive& p : spec.objects) {
    nlohmann::ordered_json jo;
    switch (p.kind) {
      case Primitive::Kind::kBox:
        jo["kind"] = "box";
        jo["cx"] = p.cx;
        jo["cy"] = p.cy;
        jo["yaw"] = p.yaw;
        jo["sx"] = p.sx;
        jo["sy"] = p.sy;
        jo["sz"] = p.sz;
        break;
      case Primitive::Kind::kCylinder:
        jo["kind"] = "cylinder";
        jo["cx"] = p.cx;
        jo["cy"] = p.cy;
        jo["radius"] = p.radius;
        jo["height"] = p.height;
        break;
      case Primitive::Kind::kSphere:
        jo["kind"] = "sphere";
        jo["cx"] = p.cx;
        jo["cy"] = p.cy;
        jo["radius"] = p.radius;
        break;
    }
    j["objects"].push_back(jo);
  }
  return j;
}

SceneSpec load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("scene: cannot open " + path);
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("scene: malformed JSON in " + path + ": " +
                             e.what());
  }
  try {
    return scene_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("scene: bad spec in " + path + ": " + e.what());
  }
}

void save_scene(const SceneSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("scene: cannot write " + path);
  }
  out << scene_to_json(spec).dump(2) << "\n";
}

void save_truth(const SceneTruth& truth, const std::string& json_path,
                const std::string& height_pgm_path) {
  // Height field at 0.1 mm resolution; 16 bits cover heights up to 6.5 m.
  constexpr double kHeightScale = 1e-4;
  Pgm16 pgm;
  pgm.width = truth.width;
  pgm.height = truth.height;
  pgm.maxval = 65535;
  pgm.samples.resize(truth.height_field.size());
  for (std::size_t i = 0; i < truth.height_field.size(); ++i) {
    const long long stored = std::llround(truth.height_field[i] / kHeightScale);
    if (stored < 0 || stored > 65535) {
      throw std::runtime_error("truth: height out of range for " +
                               height_pgm_path);
    }
    pgm.samples[i] = static_cast<std::uint16_t>(stored);
  }
  write_pgm16(pgm, height_pgm_path);

  nlohmann::ordered_json j;
  j["width"] = truth.width;
  j["height"] = truth.height;
  j["plane_depth"] = truth.plane_depth;
  j["height_pgm"] = height_pgm_path;
  j["height_unit_m"] = kHeightScale;
  nlohmann::ordered_json rle = nlohmann::ordered_json::array();
  std::size_t i = 0;
  while (i < truth.object_mask.size()) {
    const int id = truth.object_mask[i];
    std::size_t run = 1;
    while (i + run < truth.object_mask.size() &&
           truth.object_mask[i + run] == id) {
      ++run;
    }
    rle.push_back(nlohmann::ordered_json::array({id, run}));
    i += run;
  }
  j["mask_rle"] = std::move(rle);

  std::ofstream out(json_path);
  if (!out) {
    throw std::runtime_error("truth: cannot write " + json_path);
  }
  out << j.dump() << "\n";
}

}  // namespace graspkit

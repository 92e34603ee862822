#include "graspkit/camera.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace graspkit {

void CameraModel::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw std::invalid_argument("camera: focal lengths must be positive");
  }
  if (!(camera_height > 0.0)) {
    throw std::invalid_argument("camera: camera_height must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("camera: raster dimensions must be positive");
  }
}

CameraModel default_camera() { return CameraModel{}; }

CameraModel camera_from_json(const nlohmann::json& j) {
  CameraModel cam;
  cam.fx = j.at("fx").get<double>();
  cam.fy = j.at("fy").get<double>();
  cam.cx = j.at("cx").get<double>();
  cam.cy = j.at("cy").get<double>();
  cam.camera_height = j.at("camera_height_m").get<double>();
  if (j.contains("width")) cam.width = j.at("width").get<int>();
  if (j.contains("height")) cam.height = j.at("height").get<int>();
  cam.validate();
  return cam;
}

nlohmann::ordered_json camera_to_json(const CameraModel& cam) {
  nlohmann::ordered_json j;
  j["fx"] = cam.fx;
  j["fy"] = cam.fy;
  j["cx"] = cam.cx;
  j["cy"] = cam.cy;
  j["camera_height_m"] = cam.camera_height;
  j["width"] = cam.width;
  j["height"] = cam.height;
  return j;
}

CameraModel load_camera(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("camera: cannot open " + path);
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("camera: malformed JSON in " + path + ": " +
                             e.what());
  }
  try {
    return camera_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("camera: bad model in " + path + ": " + e.what());
  }
}

}  // namespace graspkit

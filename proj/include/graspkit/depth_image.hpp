#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace graspkit {

/// Dense per-pixel depth from the camera, row-major, in meters. Pixels with
/// no sensor return hold exactly the 0.0 sentinel.
struct DepthImage {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  static constexpr double kInvalid = 0.0;

  bool in_bounds(int u, int v) const {
    return u >= 0 && u < width && v >= 0 && v < height;
  }
  double at(int u, int v) const {
    return values[static_cast<std::size_t>(v) * width + u];
  }
  double& at(int u, int v) {
    return values[static_cast<std::size_t>(v) * width + u];
  }
  bool valid(int u, int v) const {
    const double d = at(u, v);
    return d > 0.0 && std::isfinite(d);
  }
};

/// Raw 16-bit binary PGM ("P5", maxval > 255, big-endian samples).
struct Pgm16 {
  int width = 0;
  int height = 0;
  int maxval = 0;
  std::vector<std::uint16_t> samples;
};

Pgm16 read_pgm16(const std::string& path);
void write_pgm16(const Pgm16& img, const std::string& path);

/// Loads a depth image from either a 16-bit binary PGM (values scaled by
/// unit_scale meters per stored unit, default millimeters) or a synthetic
/// scene-spec JSON, which is rendered with its embedded or the default
/// camera. Throws std::runtime_error on malformed input.
DepthImage load_depth(const std::string& path, double unit_scale = 0.001);

/// Writes the canonical interchange PGM (millimeters by default). Invalid
/// pixels store 0. Throws when a scaled value exceeds 16 bits.
void save_depth_pgm(const DepthImage& img, const std::string& path,
                    double unit_scale = 0.001);

}  // namespace graspkit

#include "graspkit/height_map.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace graspkit {
namespace {

// Median as the order statistic(s): value-based, so invariant to input order.
double median_of(std::vector<double>& v) {
  const std::size_t n = v.size();
  const std::size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double upper = v[mid];
  if (n % 2 == 1) return upper;
  std::nth_element(v.begin(), v.begin() + (mid - 1), v.begin() + mid);
  return 0.5 * (v[mid - 1] + upper);
}

}  // namespace

double estimate_background(const DepthImage& img, const PixelRect& roi,
                           double bin_m) {
  if (!(bin_m > 0.0)) {
    throw std::invalid_argument("background: bin width must be positive");
  }
  PixelRect r = roi;
  if (r.w == 0) r = {0, 0, img.width, img.height};
  if (r.x < 0 || r.y < 0 || r.w <= 0 || r.h <= 0 || r.x + r.w > img.width ||
      r.y + r.h > img.height) {
    throw std::invalid_argument("background: roi outside image");
  }

  std::map<long long, std::vector<double>> bins;
  std::size_t valid = 0;
  for (int v = r.y; v < r.y + r.h; ++v) {
    for (int u = r.x; u < r.x + r.w; ++u) {
      if (!img.valid(u, v)) continue;
      ++valid;
      const double d = img.at(u, v);
      bins[static_cast<long long>(std::floor(d / bin_m))].push_back(d);
    }
  }
  if (valid < 100) {
    throw std::runtime_error(
        "background: fewer than 100 valid pixels in the roi");
  }

  // Modal bin; ties resolve toward the deeper bin (the workspace is the
  // farthest surface). The returned value is the median of the depths inside
  // that bin: exact on constant regions and invariant to pixel order.
  const std::vector<double>* modal = nullptr;
  std::size_t best = 0;
  for (auto& [key, values] : bins) {
    if (values.size() >= best) {
      best = values.size();
      modal = &values;
    }
  }
  std::vector<double> chosen = *modal;
  return median_of(chosen);
}

HeightMap height_map(const DepthImage& img, double background_depth) {
  if (!(background_depth > 0.0)) {
    throw std::invalid_argument("height_map: background_depth must be positive");
  }
  HeightMap hm;
  hm.width = img.width;
  hm.height = img.height;
  hm.background_depth = background_depth;
  hm.heights.resize(img.values.size());
  for (int v = 0; v < img.height; ++v) {
    for (int u = 0; u < img.width; ++u) {
      hm.heights[static_cast<std::size_t>(v) * img.width + u] =
          img.valid(u, v) ? background_depth - img.at(u, v)
                          : HeightMap::unknown();
    }
  }
  return hm;
}

std::optional<double> robust_z(const HeightMap& hm, int u, int v, int window) {
  if (!hm.in_bounds(u, v)) {
    throw std::invalid_argument("robust_z: pixel outside image");
  }
  if (window < 1 || window % 2 == 0) {
    throw std::invalid_argument("robust_z: window must be odd and positive");
  }
  if (window == 1) {
    if (!hm.known(u, v)) return std::nullopt;
    return hm.at(u, v);
  }
  const int half = window / 2;
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(window) * window);
  for (int dv = -half; dv <= half; ++dv) {
    for (int du = -half; du <= half; ++du) {
      const int uu = u + du;
      const int vv = v + dv;
      if (!hm.in_bounds(uu, vv) || !hm.known(uu, vv)) continue;
      values.push_back(hm.at(uu, vv));
    }
  }
  if (values.empty()) return std::nullopt;
  return median_of(values);
}

}  // namespace graspkit

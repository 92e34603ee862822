#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "graspkit/depth_image.hpp"
#include "graspkit/geometry.hpp"

namespace graspkit {

/// Per-pixel height above the workspace background, in meters. Pixels whose
/// depth was invalid carry NaN ("unknown"); every stage treats a candidate
/// touching an unknown pixel as unverifiable. This is the single height
/// convention all filtering and scoring is expressed in: an object pixel has
/// height > 0, the bare workspace has height 0, and height differences equal
/// raw depth differences with the sign flipped.
struct HeightMap {
  int width = 0;
  int height = 0;
  std::vector<double> heights;
  double background_depth = 0.0;

  static double unknown() { return std::numeric_limits<double>::quiet_NaN(); }

  bool in_bounds(int u, int v) const {
    return u >= 0 && u < width && v >= 0 && v < height;
  }
  double at(int u, int v) const {
    return heights[static_cast<std::size_t>(v) * width + u];
  }
  bool known(int u, int v) const { return !std::isnan(at(u, v)); }
};

/// Modal depth of the roi on a histogram of bin_m-wide bins; the returned
/// value is the median of the depths inside the modal bin, so a constant
/// region estimates exactly and the result is invariant to pixel order.
/// Ties between bins resolve toward the deeper bin (the workspace is the
/// farthest surface). Requires >= 100 valid pixels in the roi.
double estimate_background(const DepthImage& img, const PixelRect& roi,
                           double bin_m = 0.005);

/// height = background_depth - depth per valid pixel; invalid -> unknown.
HeightMap height_map(const DepthImage& img, double background_depth);

/// Median of the known heights in the window x window neighborhood (odd
/// window, clipped at image borders); nullopt when the whole window is
/// unknown. window == 1 is a direct lookup.
std::optional<double> robust_z(const HeightMap& hm, int u, int v, int window);

}  // namespace graspkit

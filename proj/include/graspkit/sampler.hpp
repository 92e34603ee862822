#pragma once

#include <cstdint>
#include <vector>

#include "graspkit/geometry.hpp"
#include "graspkit/height_map.hpp"

namespace graspkit {

struct SamplerConfig {
  int n_samples = 5000;
  double l_v = 30.0;                    // pixels
  double margin = 0.025;                // meters above background
  double corner_imbalance_max = 0.015;  // meters
  std::uint64_t seed = 0;
  PixelRect roi;                        // w == 0 means "resolve to full image"
  int z_window = 3;
};

/// Stage 1: n_samples line poses with centers uniform over the roi shrunk by
/// l_v/2 per side (so both corners stay inside the roi at any angle) and
/// theta uniform over [0, pi). Deterministic for a fixed seed. Throws when
/// the roi's shorter side does not exceed l_v.
std::vector<LinePose> sample_lines(const SamplerConfig& cfg);

/// Stage 2, level 1: keeps poses whose center height (robust_z, z_window)
/// exceeds the margin. Unknown height rejects. Order-preserving.
std::vector<LinePose> filter_object_region(const std::vector<LinePose>& poses,
                                           const HeightMap& hm,
                                           const SamplerConfig& cfg);

/// Stage 2, level 2: keeps poses whose corner heights differ by at most
/// corner_imbalance_max (a large difference means one finger would land on
/// an object). Unknown at either corner rejects. Order-preserving.
std::vector<LinePose> filter_corner_balance(const std::vector<LinePose>& poses,
                                            const HeightMap& hm,
                                            const SamplerConfig& cfg);

}  // namespace graspkit

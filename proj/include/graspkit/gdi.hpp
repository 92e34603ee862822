#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "graspkit/geometry.hpp"
#include "graspkit/height_map.hpp"

namespace graspkit {

/// Ordering key for the final ranking:
///   kClearanceCount: (positive_fraction, max_deviation) lexicographic - the
///     default, weighing how much of the finger band is free space;
///   kEq2Max: max_deviation alone - the literal index value.
enum class RankingMode { kClearanceCount, kEq2Max };

struct GdiConfig {
  int band_px = 4;              // finger-strip half-thickness in pixels
  double clearance_min = 0.005; // deviation counted as free space, meters
  double collision_tol = 0.015; // deviation below -tol flags a collision
  RankingMode ranking_mode = RankingMode::kClearanceCount;
  int top_n = 5;
  int z_window = 3;             // palm-center robust_z window
};

/// Clearance statistics of one grasp rectangle. Deviations are palm height
/// minus band-pixel height, which equals the raw-depth deviation Z_i - Z_c:
/// positive means the finger band sits over free space.
struct GdiScore {
  GraspRect rect;
  int cluster_index = -1;
  int n_pixels = 0;            // band pixels sampled (N)
  double max_deviation = 0.0;  // meters; the literal index value
  int positive_count = 0;      // deviations > clearance_min
  double positive_fraction = 0.0;
  bool colliding = false;      // some deviation < -collision_tol, or unknown
};

/// Integer pixels of the two finger-end strips: cells whose center lies in
/// the rectangle-local region hl - 2*band <= |s| <= hl, |t| <= hw (s along
/// the long axis). Deterministic row-major order, deduplicated. Requires
/// 2*band < half_length and band < half_width; throws otherwise. The rect
/// must be fully inside the image.
std::vector<std::pair<int, int>> periphery_pixels(const GraspRect& rect,
                                                  int band);

/// Scores one rectangle against the height map. Returns nullopt when the
/// palm-center height is unknown (candidate unverifiable).
std::optional<GdiScore> gdi_score(const GraspRect& rect, const HeightMap& hm,
                                  const GdiConfig& cfg, int cluster_index = -1);

struct RankedGrasp {
  int rank = 0;  // 1-based
  GdiScore score;
  int cluster_index = -1;
};

/// Colliding candidates are excluded; survivors are ordered by the ranking
/// key (ties broken by lower cluster index, then input order) and the first
/// top_n returned with ranks 1..n.
std::vector<RankedGrasp> rank_grasps(const std::vector<GdiScore>& scores,
                                     int top_n = 5,
                                     RankingMode mode = RankingMode::kClearanceCount);

}  // namespace graspkit

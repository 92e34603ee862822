#include "graspkit/gdi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace graspkit {

std::vector<std::pair<int, int>> periphery_pixels(const GraspRect& rect,
                                                  int band) {
  if (band < 1) {
    throw std::invalid_argument("periphery: band must be positive");
  }
  if (!(2.0 * band < rect.half_length) || !(band < rect.half_width)) {
    throw std::invalid_argument("periphery: band too large for the rectangle");
  }
  const double cos_t = std::cos(rect.theta);
  const double sin_t = std::sin(rect.theta);
  const double s_outer = rect.half_length;
  const double s_inner = rect.half_length - 2.0 * band;

  // Conservative axis-aligned bounds around the whole rectangle.
  const double reach =
      std::hypot(rect.half_length, rect.half_width) + 1.0;
  const int u0 = static_cast<int>(std::floor(rect.x_c - reach));
  const int u1 = static_cast<int>(std::ceil(rect.x_c + reach));
  const int v0 = static_cast<int>(std::floor(rect.y_c - reach));
  const int v1 = static_cast<int>(std::ceil(rect.y_c + reach));

  // A pixel belongs to a finger strip when its cell center falls in the
  // rect-local region s in +/-[hl - 2*band, hl], |t| <= hw. Row-major scan
  // keeps the order deterministic and duplicate-free.
  std::vector<std::pair<int, int>> pixels;
  for (int v = v0; v <= v1; ++v) {
    for (int u = u0; u <= u1; ++u) {
      const double rx = (u + 0.5) - rect.x_c;
      const double ry = (v + 0.5) - rect.y_c;
      const double s = rx * cos_t + ry * sin_t;
      const double t = -rx * sin_t + ry * cos_t;
      if (std::fabs(t) > rect.half_width) continue;
      const double as = std::fabs(s);
      if (as < s_inner || as > s_outer) continue;
      pixels.emplace_back(u, v);
    }
  }
  return pixels;
}

std::optional<GdiScore> gdi_score(const GraspRect& rect, const HeightMap& hm,
                                  const GdiConfig& cfg, int cluster_index) {
  const int u = std::min(std::max(static_cast<int>(std::llround(rect.x_c)), 0),
                         hm.width - 1);
  const int v = std::min(std::max(static_cast<int>(std::llround(rect.y_c)), 0),
                         hm.height - 1);
  const auto palm = robust_z(hm, u, v, cfg.z_window);
  if (!palm) return std::nullopt;

  GdiScore score;
  score.rect = rect;
  score.cluster_index = cluster_index;

  const auto pixels = periphery_pixels(rect, cfg.band_px);
  score.n_pixels = static_cast<int>(pixels.size());
  double max_dev = -std::numeric_limits<double>::infinity();
  bool any_known = false;
  for (const auto& [pu, pv] : pixels) {
    if (!hm.in_bounds(pu, pv) || !hm.known(pu, pv)) {
      score.colliding = true;  // unverifiable band pixel: treat as unsafe
      continue;
    }
    any_known = true;
    // Palm height minus band height; equals the raw-depth deviation
    // Z_band - Z_palm, positive when the finger descends into free space.
    const double dev = *palm - hm.at(pu, pv);
    max_dev = std::max(max_dev, dev);
    if (dev > cfg.clearance_min) ++score.positive_count;
    if (dev < -cfg.collision_tol) score.colliding = true;
  }
  score.max_deviation = any_known ? max_dev : 0.0;
  score.positive_fraction =
      score.n_pixels > 0
          ? static_cast<double>(score.positive_count) / score.n_pixels
          : 0.0;
  return score;
}

std::vector<RankedGrasp> rank_grasps(const std::vector<GdiScore>& scores,
                                     int top_n, RankingMode mode) {
  std::vector<std::size_t> idx;
  idx.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!scores[i].colliding) idx.push_back(i);
  }
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const GdiScore& sa = scores[a];
    const GdiScore& sb = scores[b];
    if (mode == RankingMode::kClearanceCount) {
      if (sa.positive_fraction != sb.positive_fraction) {
        return sa.positive_fraction > sb.positive_fraction;
      }
    }
    if (sa.max_deviation != sb.max_deviation) {
      return sa.max_deviation > sb.max_deviation;
    }
    if (sa.cluster_index != sb.cluster_index) {
      return sa.cluster_index < sb.cluster_index;
    }
    return false;  // stable sort keeps input order for full ties
  });

  std::vector<RankedGrasp> ranked;
  const std::size_t n = std::min<std::size_t>(idx.size(),
                                              top_n > 0 ? static_cast<std::size_t>(top_n) : 0);
  ranked.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    RankedGrasp g;
    g.rank = static_cast<int>(r) + 1;
    g.score = scores[idx[r]];
    g.cluster_index = scores[idx[r]].cluster_index;
    ranked.push_back(g);
  }
  return ranked;
}

}  // namespace graspkit

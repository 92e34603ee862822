#include "graspkit/sampler.hpp"

#include <cmath>
#include <stdexcept>

#include "graspkit/rng.hpp"

namespace graspkit {
namespace {

int clamp_pixel(double coord, int size) {
  const int p = static_cast<int>(std::llround(coord));
  return std::min(std::max(p, 0), size - 1);
}

std::optional<double> height_at(const HeightMap& hm, double x, double y,
                                int window) {
  return robust_z(hm, clamp_pixel(x, hm.width), clamp_pixel(y, hm.height),
                  window);
}

void validate(const SamplerConfig& cfg) {
  if (cfg.n_samples <= 0) {
    throw std::invalid_argument("sampler: n_samples must be positive");
  }
  if (!(cfg.l_v > 0.0)) {
    throw std::invalid_argument("sampler: l_v must be positive");
  }
  if (!(cfg.margin > 0.0) || !(cfg.corner_imbalance_max > 0.0)) {
    throw std::invalid_argument("sampler: thresholds must be positive");
  }
  if (cfg.z_window < 1 || cfg.z_window % 2 == 0) {
    throw std::invalid_argument("sampler: z_window must be odd and positive");
  }
}

}  // namespace

std::vector<LinePose> sample_lines(const SamplerConfig& cfg) {
  validate(cfg);
  const PixelRect& r = cfg.roi;
  if (r.w <= 0 || r.h <= 0) {
    throw std::invalid_argument("sampler: roi must be resolved and non-empty");
  }
  if (std::min(r.w, r.h) <= cfg.l_v) {
    throw std::invalid_argument(
        "sampler: roi shorter side must exceed l_v so a line fits at any angle");
  }
  // Centers drawn from the roi shrunk by l_v/2 per side, so both corners stay
  // inside the roi at any angle.
  const double half = 0.5 * cfg.l_v;
  const double x0 = r.x + half;
  const double x1 = r.x + (r.w - 1) - half;
  const double y0 = r.y + half;
  const double y1 = r.y + (r.h - 1) - half;

  Rng rng(cfg.seed);
  std::vector<LinePose> poses;
  poses.reserve(static_cast<std::size_t>(cfg.n_samples));
  for (int i = 0; i < cfg.n_samples; ++i) {
    LinePose p;
    p.x_c = rng.uniform(x0, x1);
    p.y_c = rng.uniform(y0, y1);
    p.l_v = cfg.l_v;
    p.theta = rng.uniform(0.0, kPi);
    poses.push_back(p);
  }
  return poses;
}

std::vector<LinePose> filter_object_region(const std::vector<LinePose>& poses,
                                           const HeightMap& hm,
                                           const SamplerConfig& cfg) {
  validate(cfg);
  std::vector<LinePose> kept;
  kept.reserve(poses.size());
  for (const LinePose& p : poses) {
    const auto z = height_at(hm, p.x_c, p.y_c, cfg.z_window);
    if (z && *z > cfg.margin) kept.push_back(p);
  }
  return kept;
}

std::vector<LinePose> filter_corner_balance(const std::vector<LinePose>& poses,
                                            const HeightMap& hm,
                                            const SamplerConfig& cfg) {
  validate(cfg);
  std::vector<LinePose> kept;
  kept.reserve(poses.size());
  for (const LinePose& p : poses) {
    const auto [a, b] = corners(p);
    const auto za = height_at(hm, a.x, a.y, cfg.z_window);
    const auto zb = height_at(hm, b.x, b.y, cfg.z_window);
    if (za && zb && std::fabs(*za - *zb) <= cfg.corner_imbalance_max) {
      kept.push_back(p);
    }
  }
  return kept;
}

}  // namespace graspkit

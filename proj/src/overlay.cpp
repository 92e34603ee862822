#include "graspkit/overlay.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace graspkit {
namespace {

struct Rgb {
  unsigned char r, g, b;
};

constexpr Rgb kRed{220, 40, 40};
constexpr Rgb kGreen{40, 200, 40};
constexpr Rgb kBlue{60, 90, 230};
constexpr Rgb kYellow{250, 220, 40};

class Canvas {
 public:
  Canvas(int width, int height) : width_(width), height_(height),
                                  pixels_(static_cast<std::size_t>(width) * height * 3) {}

  void set(int u, int v, Rgb c) {
    if (u < 0 || u >= width_ || v < 0 || v >= height_) return;
    const std::size_t i = (static_cast<std::size_t>(v) * width_ + u) * 3;
    pixels_[i] = c.r;
    pixels_[i + 1] = c.g;
    pixels_[i + 2] = c.b;
  }

  // thickness 1 paints the rounded pixel; 2 paints a 2x2 block.
  void plot(double x, double y, Rgb c, int thickness) {
    const int u = static_cast<int>(std::llround(x));
    const int v = static_cast<int>(std::llround(y));
    for (int dv = 0; dv < thickness; ++dv) {
      for (int du = 0; du < thickness; ++du) {
        set(u + du, v + dv, c);
      }
    }
  }

  void line(Vec2 a, Vec2 b, Rgb c, int thickness) {
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const int steps = std::max(1, static_cast<int>(std::ceil(len / 0.25)));
    for (int i = 0; i <= steps; ++i) {
      const double t = static_cast<double>(i) / steps;
      plot(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), c, thickness);
    }
  }

  void write_ppm(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      throw std::runtime_error("overlay: cannot write " + path);
    }
    out << "P6\n" << width_ << " " << height_ << "\n255\n";
    out.write(reinterpret_cast<const char*>(pixels_.data()),
              static_cast<std::streamsize>(pixels_.size()));
    if (!out) {
      throw std::runtime_error("overlay: write failed for " + path);
    }
  }

 private:
  int width_;
  int height_;
  std::vector<unsigned char> pixels_;
};

void draw_rect(Canvas& canvas, const GraspRect& rect, int rank, Rgb color,
               int thickness) {
  const auto corner = rect_corners(rect);
  for (int e = 0; e < 4; ++e) {
    canvas.line(corner[e], corner[(e + 1) % 4], color, thickness);
  }
  // Rank encoded as tick marks along the long edge, starting at the first
  // corner: rank 1 gets one tick, rank 5 five.
  const Vec2 along{std::cos(rect.theta), std::sin(rect.theta)};
  const Vec2 inward{-std::sin(rect.theta) * 4.0, std::cos(rect.theta) * 4.0};
  for (int tick = 0; tick < rank; ++tick) {
    const Vec2 base = corner[0] - (4.0 + 4.0 * tick) * along;
    canvas.line(base, base - inward, color, thickness);
  }
}

}  // namespace

void emit_overlay(const DepthImage& img, const PipelineResult& result,
                  const std::string& path) {
  Canvas canvas(img.width, img.height);

  double d_min = std::numeric_limits<double>::infinity();
  double d_max = -std::numeric_limits<double>::infinity();
  for (int v = 0; v < img.height; ++v) {
    for (int u = 0; u < img.width; ++u) {
      if (!img.valid(u, v)) continue;
      d_min = std::min(d_min, img.at(u, v));
      d_max = std::max(d_max, img.at(u, v));
    }
  }
  for (int v = 0; v < img.height; ++v) {
    for (int u = 0; u < img.width; ++u) {
      if (!img.valid(u, v)) {
        canvas.set(u, v, Rgb{0, 0, 0});
        continue;
      }
      // Near surfaces bright, far dark, fixed range for a constant image.
      double shade = 128.0;
      if (d_max > d_min) {
        shade = 230.0 - 180.0 * (img.at(u, v) - d_min) / (d_max - d_min);
      }
      const auto g = static_cast<unsigned char>(std::llround(shade));
      canvas.set(u, v, Rgb{g, g, g});
    }
  }

  for (const LinePose& pose : result.retained_poses) {
    const auto [a, b] = corners(pose);
    canvas.line(a, b, kRed, 1);
    canvas.plot(a.x, a.y, kGreen, 1);
    canvas.plot(b.x, b.y, kGreen, 1);
  }

  // Worst rank first so the best rectangle always paints on top.
  for (auto it = result.ranked.rbegin(); it != result.ranked.rend(); ++it) {
    const bool best = it->rank == 1;
    draw_rect(canvas, it->score.rect, it->rank, best ? kYellow : kBlue,
              best ? 2 : 1);
  }
  canvas.write_ppm(path);
}

}  // namespace graspkit

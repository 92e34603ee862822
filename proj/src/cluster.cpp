#include "graspkit/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "graspkit/rng.hpp"

namespace graspkit {
namespace {

double dist2(Vec2 a, Vec2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

// Greedy k-means++: each new centroid is drawn as several D^2-weighted
// candidates and the one that lowers total inertia most is kept.
std::vector<Vec2> seed_centroids(const std::vector<Vec2>& pts, int k,
                                 Rng& rng) {
  const std::size_t n = pts.size();
  const int candidates = 2 + static_cast<int>(std::floor(std::log2(k)));
  std::vector<Vec2> centroids;
  centroids.reserve(static_cast<std::size_t>(k));
  centroids.push_back(pts[rng.index(n)]);

  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = dist2(pts[i], centroids[0]);

  while (centroids.size() < static_cast<std::size_t>(k)) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    if (!(total > 0.0)) {
      // Every point already coincides with a centroid (duplicates); any
      // choice is equivalent.
      centroids.push_back(pts[rng.index(n)]);
      continue;
    }
    std::size_t best_idx = 0;
    double best_inertia = std::numeric_limits<double>::infinity();
    for (int c = 0; c < candidates; ++c) {
      double r = rng.uniform() * total;
      std::size_t idx = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        r -= d2[i];
        if (r <= 0.0) {
          idx = i;
          break;
        }
      }
      double inertia = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        inertia += std::min(d2[i], dist2(pts[i], pts[idx]));
      }
      if (inertia < best_inertia) {
        best_inertia = inertia;
        best_idx = idx;
      }
    }
    centroids.push_back(pts[best_idx]);
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], dist2(pts[i], centroids.back()));
    }
  }
  return centroids;
}

struct LloydResult {
  std::vector<Vec2> centroids;
  std::vector<int> assignment;
  std::vector<double> trace;
  int iterations = 0;
};

LloydResult lloyd(const std::vector<Vec2>& pts, std::vector<Vec2> centroids,
                  int max_iter, double tol) {
  const std::size_t n = pts.size();
  const int k = static_cast<int>(centroids.size());
  std::vector<int> assignment(n, 0);

  // Nearest centroid, ties toward the lowest cluster index.
  const auto assign = [&]() {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = dist2(pts[i], centroids[0]);
      for (int c = 1; c < k; ++c) {
        const double d = dist2(pts[i], centroids[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assignment[i] != best) {
        assignment[i] = best;
        changed = true;
      }
    }
    return changed;
  };
  const auto inertia_now = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s += dist2(pts[i], centroids[assignment[i]]);
    }
    return s;
  };

  LloydResult res;
  assign();
  res.trace.push_back(inertia_now());

  std::vector<double> sum_x(k), sum_y(k);
  std::vector<std::size_t> count(k);
  for (int iter = 0; iter < max_iter; ++iter) {
    std::fill(sum_x.begin(), sum_x.end(), 0.0);
    std::fill(sum_y.begin(), sum_y.end(), 0.0);
    std::fill(count.begin(), count.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const int c = assignment[i];
      sum_x[c] += pts[i].x;
      sum_y[c] += pts[i].y;
      ++count[c];
    }
    double movement = 0.0;
    for (int c = 0; c < k; ++c) {
      if (count[c] == 0) continue;
      const Vec2 m{sum_x[c] / count[c], sum_y[c] / count[c]};
      movement = std::max(movement, dist2(m, centroids[c]));
      centroids[c] = m;
    }
    // Empty clusters respawn at the point farthest from its assigned
    // centroid (ties toward the lowest point index); the donor cluster's
    // mean is rebuilt after the steal.
    for (int c = 0; c < k; ++c) {
      if (count[c] != 0) continue;
      std::size_t far_i = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = dist2(pts[i], centroids[assignment[i]]);
        if (d > far_d) {
          far_d = d;
          far_i = i;
        }
      }
      const int donor = assignment[far_i];
      centroids[c] = pts[far_i];
      assignment[far_i] = c;
      count[c] = 1;
      sum_x[donor] -= pts[far_i].x;
      sum_y[donor] -= pts[far_i].y;
      --count[donor];
      if (count[donor] > 0) {
        centroids[donor] = {sum_x[donor] / count[donor],
                            sum_y[donor] / count[donor]};
      }
      movement = std::numeric_limits<double>::infinity();
    }

    const bool changed = assign();
    res.trace.push_back(inertia_now());
    ++res.iterations;
    if (!changed && movement < tol) break;
  }

  res.centroids = std::move(centroids);
  res.assignment = std::move(assignment);
  return res;
}

}  // namespace

Clustering kmeans(const std::vector<Vec2>& centers, int k, std::uint64_t seed,
                  int max_iter, double tol) {
  if (centers.empty()) {
    throw std::invalid_argument("kmeans: empty input");
  }
  if (k < 1) {
    throw std::invalid_argument("kmeans: k must be at least 1");
  }
  if (max_iter < 1 || !(tol >= 0.0)) {
    throw std::invalid_argument("kmeans: bad iteration limits");
  }
  const std::size_t n = centers.size();
  k = static_cast<int>(std::min<std::size_t>(k, n));

  // Canonicalize: the whole algorithm runs on lexicographically sorted
  // points, so the result depends only on the multiset of centers.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return centers[a].x != centers[b].x ? centers[a].x < centers[b].x
                                        : centers[a].y < centers[b].y;
  });
  std::vector<Vec2> pts(n);
  for (std::size_t i = 0; i < n; ++i) pts[i] = centers[order[i]];

  // Several deterministic restarts; greedy k-means++ alone can miss the
  // global optimum even on small instances.
  constexpr int kRestarts = 6;
  LloydResult best;
  double best_inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < kRestarts; ++r) {
    Rng rng(seed + static_cast<std::uint64_t>(r));
    LloydResult run = lloyd(pts, seed_centroids(pts, k, rng), max_iter, tol);
    if (run.trace.back() < best_inertia) {
      best_inertia = run.trace.back();
      best = std::move(run);
    }
  }

  Clustering out;
  out.k = k;
  out.iterations = best.iterations;
  out.inertia_trace = best.trace;
  out.inertia = best.trace.back();
  out.assignment.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.assignment[order[i]] = best.assignment[i];
  }
  // Rebuild centroids as exact means of their members, summing in canonical
  // (sorted) order so permuting the input yields bit-identical output.
  std::vector<double> sum_x(k, 0.0), sum_y(k, 0.0);
  std::vector<std::size_t> count(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const int c = best.assignment[i];
    sum_x[c] += pts[i].x;
    sum_y[c] += pts[i].y;
    ++count[c];
  }
  out.centroids = std::move(best.centroids);
  for (int c = 0; c < k; ++c) {
    if (count[c] > 0) {
      out.centroids[c] = {sum_x[c] / count[c], sum_y[c] / count[c]};
    }
  }
  return out;
}

std::vector<PointFamily> assign_families(const Clustering& clustering,
                                         const std::vector<LinePose>& poses) {
  if (clustering.assignment.size() != poses.size()) {
    throw std::invalid_argument(
        "families: assignment does not cover the pose list");
  }
  std::vector<PointFamily> families(static_cast<std::size_t>(clustering.k));
  for (int c = 0; c < clustering.k; ++c) families[c].cluster_index = c;
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const int c = clustering.assignment[i];
    if (c < 0 || c >= clustering.k) {
      throw std::invalid_argument("families: assignment index out of range");
    }
    const auto [a, b] = corners(poses[i]);
    families[c].points.push_back(a);
    families[c].points.push_back(b);
    families[c].source_poses.push_back(static_cast<int>(i));
  }
  families.erase(std::remove_if(families.begin(), families.end(),
                                [](const PointFamily& f) {
                                  return f.source_poses.empty();
                                }),
                 families.end());
  return families;
}

}  // namespace graspkit

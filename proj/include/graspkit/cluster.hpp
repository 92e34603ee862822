#pragma once

#include <cstdint>
#include <vector>

#include "graspkit/geometry.hpp"

namespace graspkit {

struct ClusterConfig {
  int k = 8;
  int max_iter = 100;
  double tol = 1e-4;  // squared-pixel centroid movement threshold
};

struct Clustering {
  int k = 0;
  std::vector<Vec2> centroids;
  std::vector<int> assignment;       // input index -> cluster index
  double inertia = 0.0;              // sum of squared distances, px^2
  int iterations = 0;
  std::vector<double> inertia_trace; // one entry per Lloyd iteration
};

/// Lloyd's k-means from a greedy k-means++ initialization, seeded and fully
/// deterministic. Input is canonicalized (sorted lexicographically) before
/// seeding, so the result depends only on the multiset of centers; ties in
/// nearest-centroid break toward the lowest cluster index and empty clusters
/// respawn at the point farthest from its assigned centroid. k is clamped to
/// the input size. Throws on empty input or k < 1.
Clustering kmeans(const std::vector<Vec2>& centers, int k, std::uint64_t seed,
                  int max_iter = 100, double tol = 1e-4);

/// The 2S corner points of the S line poses assigned to one cluster.
struct PointFamily {
  int cluster_index = -1;
  std::vector<Vec2> points;        // 2 per source pose, corner A then B
  std::vector<int> source_poses;   // member pose indices, ascending
};

/// One family per non-empty cluster, in cluster-index order; family points
/// are exactly the corners of the member poses. Throws when the assignment
/// does not cover the pose list.
std::vector<PointFamily> assign_families(const Clustering& clustering,
                                         const std::vector<LinePose>& poses);

}  // namespace graspkit

#pragma once

#include <cstdint>
#include <vector>

#include "pcqa/kdtree.hpp"
#include "pcqa/point_cloud.hpp"

namespace pcqa {

// Indices of the two neighborhoods attached to one reference point: its k
// nearest reference points (itself first) and the k nearest distorted points
// to the same query position.
struct NeighborhoodPair {
  std::vector<int32_t> ref;
  std::vector<int32_t> dist;
};

// Builds both spatial indexes once and answers per-point queries. k is
// clamped to each cloud's size independently.
class NeighborhoodPairer {
 public:
  NeighborhoodPairer(const PointCloud& ref, const PointCloud& dist, int k);

  // Fills `out` for the given reference point. `scratch` is caller-owned so
  // concurrent callers can each pass their own.
  void pair_at(int32_t query_index, NeighborhoodPair& out,
               std::vector<Neighbor>& scratch) const;

  int k_ref() const { return k_ref_; }
  int k_dist() const { return k_dist_; }

 private:
  const PointCloud& ref_;
  KdTree3 ref_tree_;
  KdTree3 dist_tree_;
  int k_ref_ = 0;
  int k_dist_ = 0;
};

// Convenience wrapper producing all pairs at once.
std::vector<NeighborhoodPair> pair_neighborhoods(const PointCloud& ref,
                                                 const PointCloud& dist, int k);

}  // namespace pcqa

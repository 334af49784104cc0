#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pcqa/geometry.hpp"

namespace pcqa {

struct Neighbor {
  double dist2 = 0.0;
  int32_t index = -1;
};

// Total order on candidates: closer first, then smaller point index. Keeps
// results reproducible when several points sit at exactly the same distance.
inline bool neighbor_less(const Neighbor& a, const Neighbor& b) {
  return a.dist2 < b.dist2 || (a.dist2 == b.dist2 && a.index < b.index);
}

struct KnnQuery;

// Exact k nearest neighbors over a fixed set of 3d points.
class KdTree3 {
 public:
  explicit KdTree3(std::span<const Vec3> points);

  // Fills `out` with the k nearest points to `query`, sorted by
  // neighbor_less. Returns the count (min(k, size)).
  int knn(const Vec3& query, int k, std::vector<Neighbor>& out) const;

  std::size_t size() const { return points_.size(); }

 private:
  static constexpr int kLeafSize = 16;

  struct Node {
    double split = 0.0;
    int32_t begin = 0;
    int32_t end = 0;
    int32_t left = -1;
    int32_t right = -1;
    int8_t axis = -1;
  };

  int32_t build(int32_t begin, int32_t end);
  void search(int32_t node_id, double bound, KnnQuery& ctx) const;

  std::vector<Node> nodes_;
  std::vector<Vec3> points_;   // leaf order
  std::vector<int32_t> ids_;   // leaf order -> original index
  const Vec3* source_ = nullptr;  // only during build
  int32_t root_ = -1;
};

// Reference implementation with the same ordering contract; used to validate
// the tree and as a fallback for tiny inputs.
int brute_force_knn(std::span<const Vec3> points, const Vec3& query, int k,
                    std::vector<Neighbor>& out);

}  // namespace pcqa

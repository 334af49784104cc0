#include "pcqa/neighborhood.hpp"

#include <algorithm>

#include "pcqa/errors.hpp"

namespace pcqa {

NeighborhoodPairer::NeighborhoodPairer(const PointCloud& ref, const PointCloud& dist, int k)
    : ref_(ref), ref_tree_(ref.positions), dist_tree_(dist.positions) {
  if (ref.positions.empty()) throw EmptyCloud("reference cloud is empty");
  if (dist.positions.empty()) throw EmptyCloud("distorted cloud is empty");
  if (k <= 0) throw BadArgument("neighborhood size must be positive");
  k_ref_ = std::min<int>(k, static_cast<int>(ref.positions.size()));
  k_dist_ = std::min<int>(k, static_cast<int>(dist.positions.size()));
}

void NeighborhoodPairer::pair_at(int32_t query_index, NeighborhoodPair& out,
                                 std::vector<Neighbor>& scratch) const {
  const Vec3& q = ref_.positions[query_index];

  ref_tree_.knn(q, k_ref_, scratch);
  out.ref.resize(scratch.size());
  for (std::size_t i = 0; i < scratch.size(); ++i) out.ref[i] = scratch[i].index;

  dist_tree_.knn(q, k_dist_, scratch);
  out.dist.resize(scratch.size());
  for (std::size_t i = 0; i < scratch.size(); ++i) out.dist[i] = scratch[i].index;
}

std::vector<NeighborhoodPair> pair_neighborhoods(const PointCloud& ref, const PointCloud& dist,
                                                 int k) {
  NeighborhoodPairer pairer(ref, dist, k);
  std::vector<NeighborhoodPair> pairs(ref.positions.size());
  std::vector<Neighbor> scratch;
  for (std::size_t i = 0; i < ref.positions.size(); ++i) {
    pairer.pair_at(static_cast<int32_t>(i), pairs[i], scratch);
  }
  return pairs;
}

}  // namespace pcqa

#pragma once

#include <span>
#include <vector>

#include "pcqa/geometry.hpp"
#include "pcqa/neighborhood.hpp"
#include "pcqa/point_cloud.hpp"

namespace pcqa {

struct EigenDecomposition {
  Vec3 lambda;  // descending, clamped >= 0
  Mat3 basis;   // columns are the matching unit eigenvectors, sign-fixed
};

struct LocalBasis {
  Vec3 centroid;
  EigenDecomposition eig;
};

// One reference point's neighborhoods expressed in the reference eigenbasis.
// ref_basis lives in world coordinates; dist_basis is the PCA of the mapped
// distorted neighborhood, so its centroid is the distorted mean in the local
// frame.
struct MappedNeighborhood {
  std::vector<Vec3> omega_ref;
  std::vector<Vec3> omega_dist;
  Vec3 omega_q_ref;   // mapped query point (ref side)
  Vec3 omega_q_dist;  // mapped nearest distorted neighbor
  LocalBasis ref_basis;
  LocalBasis dist_basis;
};

Vec3 centroid_of(std::span<const Vec3> pts);
Vec3 centroid_of(std::span<const Vec3> pts, std::span<const int32_t> idx);

// Covariance about a given center with 1/N normalization.
Mat3 covariance_about(std::span<const Vec3> pts, const Vec3& center);
Mat3 covariance_about(std::span<const Vec3> pts, std::span<const int32_t> idx,
                      const Vec3& center);

// Closed-form symmetric 3x3 eigendecomposition. Eigenvalues descending and
// clamped to >= 0; each eigenvector's largest-magnitude component is made
// positive (first such component on ties). Zero matrix yields the identity
// basis. Reconstructs V diag(l) V^T to 1e-9 * max(1, |cov|).
EigenDecomposition eigendecompose(const Mat3& cov);

// Projects both neighborhoods onto the reference basis and runs PCA on the
// mapped distorted coordinates. `out` buffers are reused across calls.
void map_pair(const PointCloud& ref, const PointCloud& dist, const NeighborhoodPair& pair,
              MappedNeighborhood& out);

}  // namespace pcqa

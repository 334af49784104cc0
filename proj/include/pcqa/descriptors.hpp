#pragma once

#include <span>

#include "pcqa/local_pca.hpp"

namespace pcqa {

// Division / log guard for degenerate neighborhoods.
constexpr double kGuardEps = 1e-12;

struct GeomDescriptors {
  Vec3 e;                 // mapped query error vector
  Vec3 eps;               // per-axis components of e
  double origin_ref_norm = 0.0;
  double origin_dist_norm = 0.0;
  Vec3 origin_ref_proj;
  Vec3 origin_dist_proj;
  Vec3 mu_B;              // mean of the mapped distorted neighborhood
  Vec3 var_A, var_B;      // per-axis variance of mapped coordinates
  double sumvar_A = 0.0, sumvar_B = 0.0;
  Vec3 cross_cov_diag;
  double omni_A = 0.0, omni_B = 0.0;
  double entropy_A = 0.0, entropy_B = 0.0;
  double aniso_A = 0.0, aniso_B = 0.0;
  double planar_A = 0.0, planar_B = 0.0;
  double linear_A = 0.0, linear_B = 0.0;
  double scatter_A = 0.0, scatter_B = 0.0;
  double curv_A = 0.0, curv_B = 0.0;
  Vec3 parallel;          // P_m per axis
  Vec3 angsim;            // theta_m per axis
};

struct TexDescriptors {
  Vec3 mean_A, mean_B;    // per YCbCr channel
  Vec3 var_A, var_B;
  double sumvar_A = 0.0, sumvar_B = 0.0;
  Vec3 cross_cov_diag;
  double omni_A = 0.0, omni_B = 0.0;
  double entropy_A = 0.0, entropy_B = 0.0;
};

// Eigenvalue shape ratios shared by both sides; lambda descending >= 0.
struct ShapeSet {
  double omni = 0.0, entropy = 0.0, aniso = 0.0, planar = 0.0;
  double linear = 0.0, scatter = 0.0, curv = 0.0;
};
ShapeSet shape_from_eigenvalues(const Vec3& lambda);

GeomDescriptors geometry_descriptors(const MappedNeighborhood& m);

TexDescriptors texture_descriptors(std::span<const Vec3> ref_tex,
                                   std::span<const Vec3> dist_tex);

}  // namespace pcqa

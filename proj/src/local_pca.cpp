#include "pcqa/local_pca.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pcqa {

Vec3 centroid_of(std::span<const Vec3> pts) {
  Vec3 c;
  for (const Vec3& p : pts) c += p;
  return c / static_cast<double>(pts.size());
}

Vec3 centroid_of(std::span<const Vec3> pts, std::span<const int32_t> idx) {
  Vec3 c;
  for (int32_t i : idx) c += pts[i];
  return c / static_cast<double>(idx.size());
}

Mat3 covariance_about(std::span<const Vec3> pts, const Vec3& center) {
  Mat3 cov;
  for (const Vec3& p : pts) {
    const Vec3 d = p - center;
    cov(0, 0) += d.x * d.x;
    cov(0, 1) += d.x * d.y;
    cov(0, 2) += d.x * d.z;
    cov(1, 1) += d.y * d.y;
    cov(1, 2) += d.y * d.z;
    cov(2, 2) += d.z * d.z;
  }
  const double inv_n = 1.0 / static_cast<double>(pts.size());
  cov(0, 0) *= inv_n;
  cov(0, 1) *= inv_n;
  cov(0, 2) *= inv_n;
  cov(1, 1) *= inv_n;
  cov(1, 2) *= inv_n;
  cov(2, 2) *= inv_n;
  cov(1, 0) = cov(0, 1);
  cov(2, 0) = cov(0, 2);
  cov(2, 1) = cov(1, 2);
  return cov;
}

Mat3 covariance_about(std::span<const Vec3> pts, std::span<const int32_t> idx,
                      const Vec3& center) {
  Mat3 cov;
  for (int32_t i : idx) {
    const Vec3 d = pts[i] - center;
    cov(0, 0) += d.x * d.x;
    cov(0, 1) += d.x * d.y;
    cov(0, 2) += d.x * d.z;
    cov(1, 1) += d.y * d.y;
    cov(1, 2) += d.y * d.z;
    cov(2, 2) += d.z * d.z;
  }
  const double inv_n = 1.0 / static_cast<double>(idx.size());
  cov(0, 0) *= inv_n;
  cov(0, 1) *= inv_n;
  cov(0, 2) *= inv_n;
  cov(1, 1) *= inv_n;
  cov(1, 2) *= inv_n;
  cov(2, 2) *= inv_n;
  cov(1, 0) = cov(0, 1);
  cov(2, 0) = cov(0, 2);
  cov(2, 1) = cov(1, 2);
  return cov;
}

namespace {

void fix_signs(Mat3& v) {
  for (int j = 0; j < 3; ++j) {
    int best = 0;
    for (int r = 1; r < 3; ++r) {
      if (std::fabs(v(r, j)) > std::fabs(v(best, j))) best = r;
    }
    if (v(best, j) < 0.0) {
      for (int r = 0; r < 3; ++r) v(r, j) = -v(r, j);
    }
  }
}

Vec3 normalized(const Vec3& v) {
  const double n = norm(v);
  return n > 0.0 ? v / n : Vec3{1, 0, 0};
}

// Null direction of (b - lambda I) via the largest cross product of its rows.
Vec3 eigenvector_for(const Mat3& b, double lambda) {
  const Vec3 r0{b(0, 0) - lambda, b(0, 1), b(0, 2)};
  const Vec3 r1{b(0, 1), b(1, 1) - lambda, b(1, 2)};
  const Vec3 r2{b(0, 2), b(1, 2), b(2, 2) - lambda};
  const Vec3 c0 = cross(r0, r1);
  const Vec3 c1 = cross(r0, r2);
  const Vec3 c2 = cross(r1, r2);
  const double n0 = norm2(c0), n1 = norm2(c1), n2 = norm2(c2);
  const Vec3* best = &c0;
  double best_n = n0;
  if (n1 > best_n) {
    best = &c1;
    best_n = n1;
  }
  if (n2 > best_n) {
    best = &c2;
    best_n = n2;
  }
  if (best_n > 1e-28) return *best / std::sqrt(best_n);
  // Numerically rank-deficient pencil: fall back to the axis the shifted
  // matrix moves the least.
  const double cols[3] = {norm2({r0.x, r1.x, r2.x}), norm2({r0.y, r1.y, r2.y}),
                          norm2({r0.z, r1.z, r2.z})};
  int axis = 0;
  for (int a = 1; a < 3; ++a) {
    if (cols[a] < cols[axis]) axis = a;
  }
  Vec3 e;
  e[axis] = 1.0;
  return e;
}

// Orthonormal pair spanning the plane normal to unit vector v.
void complement(const Vec3& v, Vec3& u, Vec3& w) {
  int axis = 0;
  for (int a = 1; a < 3; ++a) {
    if (std::fabs(v[a]) < std::fabs(v[axis])) axis = a;
  }
  Vec3 e;
  e[axis] = 1.0;
  u = normalized(e - v * v[axis]);
  w = cross(v, u);
}

EigenDecomposition diagonal_decomposition(double d0, double d1, double d2) {
  int order[3] = {0, 1, 2};
  const double d[3] = {d0, d1, d2};
  std::stable_sort(order, order + 3, [&](int a, int b) { return d[a] > d[b]; });
  EigenDecomposition out;
  for (int j = 0; j < 3; ++j) {
    out.lambda[j] = std::max(d[order[j]], 0.0);
    out.basis(order[j], j) = 1.0;
  }
  return out;
}

// Cyclic Jacobi diagonalization, the deterministic cleanup for the rare
// inputs where the closed form leaves a visible residual (tightly clustered
// eigenvalues at unfriendly conditioning). `m` is consumed.
void jacobi3(Mat3 m, double lam[3], Vec3 vecs[3]) {
  double v[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (int sweep = 0; sweep < 24; ++sweep) {
    const double off =
        std::max({std::fabs(m(0, 1)), std::fabs(m(0, 2)), std::fabs(m(1, 2))});
    if (off <= 1e-16) break;
    static constexpr int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (const auto& pq : pairs) {
      const int p = pq[0], q = pq[1];
      const double apq = m(p, q);
      if (apq == 0.0) continue;
      const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
      const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                       (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
      const double c = 1.0 / std::sqrt(t * t + 1.0);
      const double s = t * c;
      for (int i = 0; i < 3; ++i) {
        const double mip = m(i, p), miq = m(i, q);
        m(i, p) = c * mip - s * miq;
        m(i, q) = s * mip + c * miq;
      }
      for (int i = 0; i < 3; ++i) {
        const double mpi = m(p, i), mqi = m(q, i);
        m(p, i) = c * mpi - s * mqi;
        m(q, i) = s * mpi + c * mqi;
      }
      for (int i = 0; i < 3; ++i) {
        const double vip = v[i][p], viq = v[i][q];
        v[i][p] = c * vip - s * viq;
        v[i][q] = s * vip + c * viq;
      }
    }
  }
  int order[3] = {0, 1, 2};
  const double d[3] = {m(0, 0), m(1, 1), m(2, 2)};
  std::stable_sort(order, order + 3, [&](int a, int b) { return d[a] > d[b]; });
  for (int j = 0; j < 3; ++j) {
    lam[j] = d[order[j]];
    vecs[j] = {v[0][order[j]], v[1][order[j]], v[2][order[j]]};
  }
}

}  // namespace

EigenDecomposition eigendecompose(const Mat3& cov) {
  double scale = 0.0;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) scale = std::max(scale, std::fabs(cov(r, c)));

  EigenDecomposition out;
  if (scale == 0.0) {
    out.basis(0, 0) = out.basis(1, 1) = out.basis(2, 2) = 1.0;
    return out;
  }

  const double inv_scale = 1.0 / scale;
  Mat3 b;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) b(r, c) = cov(r, c) * inv_scale;
  // Force exact symmetry so rounding in the caller cannot leak through.
  b(1, 0) = b(0, 1);
  b(2, 0) = b(0, 2);
  b(2, 1) = b(1, 2);

  const double off = std::max({std::fabs(b(0, 1)), std::fabs(b(0, 2)), std::fabs(b(1, 2))});
  if (off <= 1e-12) {
    out = diagonal_decomposition(b(0, 0), b(1, 1), b(2, 2));
    out.lambda = out.lambda * scale;
    return out;
  }

  // Trigonometric eigenvalues of the scaled matrix.
  const double q = b.trace() / 3.0;
  const double p1 = b(0, 1) * b(0, 1) + b(0, 2) * b(0, 2) + b(1, 2) * b(1, 2);
  const double a00 = b(0, 0) - q, a11 = b(1, 1) - q, a22 = b(2, 2) - q;
  const double p2 = a00 * a00 + a11 * a11 + a22 * a22 + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  const double inv_p = 1.0 / p;
  const double n00 = a00 * inv_p, n11 = a11 * inv_p, n22 = a22 * inv_p;
  const double n01 = b(0, 1) * inv_p, n02 = b(0, 2) * inv_p, n12 = b(1, 2) * inv_p;
  const double det = n00 * (n11 * n22 - n12 * n12) - n01 * (n01 * n22 - n12 * n02) +
                     n02 * (n01 * n12 - n11 * n02);
  const double r = std::clamp(det / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  double l1 = q + 2.0 * p * std::cos(phi);
  double l3 = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  double l2 = 3.0 * q - l1 - l3;

  Vec3 v1, v2, v3;
  const double tau = 1e-10 * std::max(1.0, std::fabs(l1));
  if (l1 - l3 <= tau) {
    v1 = {1, 0, 0};
    v2 = {0, 1, 0};
    v3 = {0, 0, 1};
  } else if (l1 - l2 <= tau) {
    v3 = eigenvector_for(b, l3);
    complement(v3, v1, v2);
  } else if (l2 - l3 <= tau) {
    v1 = eigenvector_for(b, l1);
    complement(v1, v2, v3);
  } else {
    v1 = eigenvector_for(b, l1);
    v3 = eigenvector_for(b, l3);
    v2 = normalized(cross(v3, v1));
  }

  // The closed form is the fast path; accept it only when it actually
  // reconstructs the scaled input (entries are O(1) here, so the threshold
  // is effectively relative).
  double lam[3] = {l1, l2, l3};
  Vec3 vecs[3] = {v1, v2, v3};
  double resid = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      double r = -b(i, j);
      for (int m = 0; m < 3; ++m) r += vecs[m][i] * lam[m] * vecs[m][j];
      resid = std::max(resid, std::fabs(r));
    }
  }
  if (resid > 1e-12) jacobi3(b, lam, vecs);

  out.lambda = {std::max(lam[0] * scale, 0.0), std::max(lam[1] * scale, 0.0),
                std::max(lam[2] * scale, 0.0)};
  for (int r_ = 0; r_ < 3; ++r_) {
    out.basis(r_, 0) = vecs[0][r_];
    out.basis(r_, 1) = vecs[1][r_];
    out.basis(r_, 2) = vecs[2][r_];
  }
  fix_signs(out.basis);
  return out;
}

void map_pair(const PointCloud& ref, const PointCloud& dist, const NeighborhoodPair& pair,
              MappedNeighborhood& out) {
  const Vec3 c = centroid_of(ref.positions, pair.ref);
  const Mat3 cov = covariance_about(ref.positions, pair.ref, c);
  out.ref_basis.centroid = c;
  out.ref_basis.eig = eigendecompose(cov);

  const Vec3 v1 = out.ref_basis.eig.basis.col(0);
  const Vec3 v2 = out.ref_basis.eig.basis.col(1);
  const Vec3 v3 = out.ref_basis.eig.basis.col(2);

  out.omega_ref.resize(pair.ref.size());
  for (std::size_t n = 0; n < pair.ref.size(); ++n) {
    const Vec3 d = ref.positions[pair.ref[n]] - c;
    out.omega_ref[n] = {dot(d, v1), dot(d, v2), dot(d, v3)};
  }
  out.omega_dist.resize(pair.dist.size());
  for (std::size_t n = 0; n < pair.dist.size(); ++n) {
    const Vec3 d = dist.positions[pair.dist[n]] - c;
    out.omega_dist[n] = {dot(d, v1), dot(d, v2), dot(d, v3)};
  }
  out.omega_q_ref = out.omega_ref[0];
  out.omega_q_dist = out.omega_dist[0];

  const Vec3 mu_b = centroid_of(out.omega_dist);
  out.dist_basis.centroid = mu_b;
  out.dist_basis.eig = eigendecompose(covariance_about(out.omega_dist, mu_b));
}

}  // namespace pcqa

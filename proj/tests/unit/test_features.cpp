#include <doctest.h>

#include <cmath>
#include <cstring>
#include <set>
#include <stdexcept>
#include <vector>

#include "pcqa/errors.hpp"
#include "pcqa/features.hpp"
#include "pcqa/rng.hpp"
#include "pcqa/synth.hpp"
#include "support.hpp"

using namespace pcqa;

namespace {

bool rows_bitwise_equal(const PredictorRow& a, const PredictorRow& b) {
  return std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0;
}

int name_index(const std::string& name) {
  const auto& names = feature_names();
  for (int i = 0; i < kFeatureCount; ++i)
    if (names[i] == name) return i;
  throw std::out_of_range("no feature named " + name);
}

}  // namespace

TEST_CASE("distance functions: frozen values and identities") {
  CHECK(dist_delta(2.0, 1.0) == doctest::Approx(0.33333322222225926).epsilon(1e-15));
  CHECK(dist_delta(5.0, 5.0) == 0.0);
  CHECK(dist_delta(-3.0, -3.0) == 0.0);
  CHECK(dist_alpha({0, 0, 0}) == 0.0);
  CHECK(dist_beta(0.25) == 0.25);
  CHECK(dist_beta(-0.25) == 0.25);
  // identical neighborhoods: cross covariance equals the shared variance
  CHECK(dist_gamma(0.4, 0.4, 0.4) == 0.0);
}

TEST_CASE("delta and gamma are bounded by [0,1] on random inputs") {
  Rng rng(64);
  for (int trial = 0; trial < 20000; ++trial) {
    const double a = (rng.uniform01() * 2 - 1) * std::pow(10.0, rng.uniform01() * 8 - 4);
    const double b = (rng.uniform01() * 2 - 1) * std::pow(10.0, rng.uniform01() * 8 - 4);
    const double d = dist_delta(a, b);
    CHECK(d >= 0.0);
    CHECK(d <= 1.0);
    // gamma with Cauchy-Schwarz-consistent inputs: |cross| <= sqrt(va*vb)
    const double va = std::fabs(a), vb = std::fabs(b);
    const double cross = (rng.uniform01() * 2 - 1) * std::sqrt(va * vb);
    const double g = dist_gamma(va, vb, cross);
    CHECK(g >= 0.0);
    CHECK(g <= 1.0);
  }
}

TEST_CASE("canonical layout has 44 unique names in the documented order") {
  const auto& names = feature_names();
  CHECK(names.size() == 44);
  CHECK(std::set<std::string>(names.begin(), names.end()).size() == 44);
  CHECK(names[0] == "g_e_alpha");
  CHECK(names[4] == "g_origin_alpha");
  CHECK(names[8] == "g_mean_alpha");
  CHECK(names[15] == "g_sumvar_delta");
  CHECK(names[19] == "g_omni_delta");
  CHECK(names[26] == "g_parallel_1");
  CHECK(names[29] == "g_angsim_1");
  CHECK(names[31] == "g_angsim_3");
  CHECK(names[32] == "t_mean_delta_y");
  CHECK(names[38] == "t_sumvar_delta");
  CHECK(names[43] == "t_entropy_delta");
}

TEST_CASE("pooling: single row and two-row midpoint") {
  PredictorMatrix pm;
  PredictorRow r0{}, r1{};
  for (int i = 0; i < kFeatureCount; ++i) {
    r0[i] = 0.0;
    r1[i] = 1.0;
  }
  pm.rows = {r0};
  CHECK(rows_bitwise_equal(pool(pm), r0));
  pm.rows = {r0, r1};
  const PredictorRow mid = pool(pm);
  for (int i = 0; i < kFeatureCount; ++i) CHECK(mid[i] == 0.5);
}

TEST_CASE("pooled means match a long-double oracle to 1e-12 relative") {
  Rng rng(87);
  PredictorMatrix pm;
  pm.rows.resize(10000);
  for (auto& row : pm.rows)
    for (double& v : row) v = (rng.uniform01() * 2 - 1) * std::pow(10.0, rng.uniform01() * 6 - 3);

  long double oracle[kFeatureCount] = {};
  for (const auto& row : pm.rows)
    for (int i = 0; i < kFeatureCount; ++i) oracle[i] += static_cast<long double>(row[i]);

  const PredictorRow mean = pool(pm);
  for (int i = 0; i < kFeatureCount; ++i) {
    const double expect = static_cast<double>(oracle[i] / pm.rows.size());
    CHECK(std::fabs(mean[i] - expect) <= 1e-12 * std::max(1.0, std::fabs(expect)));
  }
}

TEST_CASE("PooledMean is independent of which worker owns which block") {
  // Same rows, same block-local order, different interleavings across blocks.
  Rng rng(5);
  const std::size_t n = PooledMean::kBlock * 2 + 123;
  std::vector<PredictorRow> rows(n);
  for (auto& r : rows)
    for (double& v : r) v = rng.uniform01();

  PooledMean fwd(n);
  for (std::size_t i = 0; i < n; ++i) fwd.add_row(i, rows[i]);

  PooledMean blocks(n);
  // add the tail block first, then the head blocks, in-block order preserved
  for (std::size_t i = PooledMean::kBlock * 2; i < n; ++i) blocks.add_row(i, rows[i]);
  for (std::size_t i = 0; i < PooledMean::kBlock * 2; ++i) blocks.add_row(i, rows[i]);

  const PredictorRow a = fwd.finalize();
  const PredictorRow b = blocks.finalize();
  CHECK(rows_bitwise_equal(a, b));
}

TEST_CASE("extract_features of a cloud against itself is the identity vector") {
  const PointCloud pc = make_reference(Shape::ColoredGradientSphere, 1000, 3);
  const FeatureVector fv = extract_features(pc, pc, 32);
  const auto& names = feature_names();
  for (int i = 0; i < kFeatureCount; ++i) {
    if (names[i].rfind("g_angsim", 0) == 0) {
      CHECK(fv.f[i] >= 0.999);
    } else {
      CHECK(std::fabs(fv.f[i]) <= 1e-9);
    }
  }
  CHECK(fv.k_requested == 32);
  CHECK(fv.k_ref == 32);
  CHECK(fv.k_dist == 32);
}

TEST_CASE("extracted features are bit-identical for any thread count") {
  const PointCloud ref = make_reference(Shape::ColoredGradientSphere, 6000, 11);
  DistortionSpec spec{DistortionKind::GeomGaussNoise, 0.004, 99};
  const PointCloud dist = apply_distortion(ref, spec);
  const FeatureVector t1 = extract_features(ref, dist, 24, 1);
  const FeatureVector t3 = extract_features(ref, dist, 24, 3);
  const FeatureVector t8 = extract_features(ref, dist, 24, 8);
  CHECK(rows_bitwise_equal(t1.f, t3.f));
  CHECK(rows_bitwise_equal(t1.f, t8.f));
}

TEST_CASE("color-only distortion leaves geometry features at zero") {
  const PointCloud ref = make_reference(Shape::ColoredGradientSphere, 2000, 21);
  DistortionSpec spec{DistortionKind::ColorGaussNoise, 0.1, 5};
  const PointCloud dist = apply_distortion(ref, spec);
  const FeatureVector fv = extract_features(ref, dist, 24);
  for (int i = 0; i < 12; ++i) CHECK(std::fabs(fv.f[i]) <= 1e-9);
  CHECK(fv.f[name_index("t_var_delta_y")] > 0.0);
  CHECK(fv.f[name_index("t_sumvar_delta")] > 0.0);
  CHECK(fv.f[name_index("t_mean_delta_y")] > 0.0);
}

TEST_CASE("rigid translation keeps spread features near zero but moves error features") {
  // The shift must stay far below the sampling density (~0.08 here) or the
  // knn member sets change and the spread deltas pick up real signal.
  const PointCloud ref = make_reference(Shape::CubeVolume, 2000, 31);
  PointCloud dist = ref;
  const Vec3 t{4e-8, -3e-8, 2e-8};
  for (Vec3& p : dist.positions) p += t;
  const FeatureVector fv = extract_features(ref, dist, 24);
  CHECK(fv.f[name_index("g_e_alpha")] == doctest::Approx(norm(t)).epsilon(1e-3));
  CHECK(fv.f[name_index("g_mean_alpha")] == doctest::Approx(norm(t)).epsilon(1e-3));
  // shape is preserved and membership unchanged, so spread deltas vanish
  CHECK(fv.f[name_index("g_var_delta_1")] <= 1e-9);
  CHECK(fv.f[name_index("g_sumvar_delta")] <= 1e-9);
  CHECK(fv.f[name_index("g_omni_delta")] <= 1e-9);
  CHECK(fv.f[name_index("g_entropy_delta")] <= 1e-9);
}

TEST_CASE("joint rotation of both clouds barely moves basis-relative features") {
  const PointCloud ref = make_reference(Shape::ColoredGradientSphere, 2500, 41);
  DistortionSpec spec{DistortionKind::GeomGaussNoise, 0.005, 7};
  const PointCloud dist = apply_distortion(ref, spec);

  const double a = 0.6, b = -0.9, c = 1.7;
  const double ca = std::cos(a), sa = std::sin(a);
  const double cb = std::cos(b), sb = std::sin(b);
  const double cc = std::cos(c), sc = std::sin(c);
  Mat3 r;
  r(0, 0) = ca * cb;
  r(0, 1) = ca * sb * sc - sa * cc;
  r(0, 2) = ca * sb * cc + sa * sc;
  r(1, 0) = sa * cb;
  r(1, 1) = sa * sb * sc + ca * cc;
  r(1, 2) = sa * sb * cc - ca * sc;
  r(2, 0) = -sb;
  r(2, 1) = cb * sc;
  r(2, 2) = cb * cc;

  PointCloud ref_r = ref, dist_r = dist;
  for (Vec3& p : ref_r.positions) p = r.apply(p);
  for (Vec3& p : dist_r.positions) p = r.apply(p);

  const FeatureVector f0 = extract_features(ref, dist, 24);
  const FeatureVector f1 = extract_features(ref_r, dist_r, 24);
  for (int i = 12; i < kFeatureCount; ++i) {
    CHECK(std::fabs(f0.f[i] - f1.f[i]) <= 1e-6);
  }
}

TEST_CASE("feature CSV round-trips every bit of the vector") {
  const PointCloud ref = make_reference(Shape::Sphere, 800, 51);
  DistortionSpec spec{DistortionKind::GeomQuantize, 0.02, 0};
  const PointCloud dist = apply_distortion(ref, spec);
  FeatureVector fv = extract_features(ref, dist, 16);
  fv.ref_id = "sphere51";
  fv.dist_id = "sphere51_q02";

  test::TempDir tmp;
  test::write_text(tmp.path("f.csv"), feature_csv_header() + "\n" + feature_csv_row(fv) + "\n");
  const auto back = read_feature_csv(tmp.path("f.csv"));
  REQUIRE(back.size() == 1);
  CHECK(back[0].ref_id == fv.ref_id);
  CHECK(back[0].dist_id == fv.dist_id);
  CHECK(back[0].k_requested == fv.k_requested);
  CHECK(rows_bitwise_equal(back[0].f, fv.f));
}

TEST_CASE("feature CSV with a reordered header is rejected") {
  test::TempDir tmp;
  std::string hdr = feature_csv_header();
  const auto pos = hdr.find("g_e_alpha");
  REQUIRE(pos != std::string::npos);
  hdr.replace(pos, std::string("g_e_alpha").size(), "g_e_omega");
  test::write_text(tmp.path("bad.csv"), hdr + "\n");
  CHECK_THROWS_AS((void)read_feature_csv(tmp.path("bad.csv")), LayoutMismatch);
}

TEST_CASE("feature cache stores and restores a vector") {
  const PointCloud ref = make_reference(Shape::Plane, 600, 61);
  DistortionSpec spec{DistortionKind::Downsample, 0.5, 17};
  const PointCloud dist = apply_distortion(ref, spec);
  FeatureVector fv = extract_features(ref, dist, 12);
  fv.ref_id = "p";
  fv.dist_id = "p_ds";

  test::TempDir tmp;
  const std::string name = feature_cache_name(cloud_hash(ref), cloud_hash(dist), 12);
  FeatureVector out;
  CHECK_FALSE(load_cached_features(tmp.dir(), name, out));
  store_cached_features(tmp.dir(), name, fv);
  REQUIRE(load_cached_features(tmp.dir(), name, out));
  CHECK(rows_bitwise_equal(out.f, fv.f));
  CHECK(out.k_ref == fv.k_ref);
  CHECK(out.k_dist == fv.k_dist);

  // a different K keys a different entry
  CHECK_FALSE(load_cached_features(
      tmp.dir(), feature_cache_name(cloud_hash(ref), cloud_hash(dist), 13), out));
}

TEST_CASE("empty clouds are rejected") {
  PointCloud empty;
  const PointCloud pc = make_reference(Shape::Sphere, 100, 1);
  CHECK_THROWS_AS((void)extract_features(empty, pc, 8), EmptyCloud);
  CHECK_THROWS_AS((void)extract_features(pc, empty, 8), EmptyCloud);
}

// Release gate: one check per acceptance criterion, one result line each.
// Exit status is the number of failed criteria, so CI can gate on it and a
// human can read the transcript. Criterion 6 needs the public datasets and is
// skipped (not failed) when PCQA_DATASETS is not set; criterion 8 reports
// pass/warn and never fails the gate.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "pcqa/descriptors.hpp"
#include "pcqa/errors.hpp"
#include "pcqa/evaluation.hpp"
#include "pcqa/features.hpp"
#include "pcqa/kdtree.hpp"
#include "pcqa/local_pca.hpp"
#include "pcqa/neighborhood.hpp"
#include "pcqa/parallel.hpp"
#include "pcqa/random_forest.hpp"
#include "pcqa/rng.hpp"
#include "pcqa/synth.hpp"

namespace fs = std::filesystem;
using namespace pcqa;

namespace {

struct Outcome {
  std::string status;  // PASS / FAIL / SKIP / WARN
  std::string detail;
};

Outcome pass(std::string detail) { return {"PASS", std::move(detail)}; }
Outcome fail(std::string detail) { return {"FAIL", std::move(detail)}; }

double now_s() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

bool finite_row(const PredictorRow& r) {
  for (double v : r) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

// Feature indices whose predictors are bounded to [0, 1] by construction:
// every delta, gamma, parallelity and angular-similarity column. alpha/beta
// columns are unbounded distances and only need to be finite.
const std::vector<int>& bounded_indices() {
  static const std::vector<int> idx = [] {
    std::vector<int> v;
    const auto& names = feature_names();
    for (int j = 0; j < kFeatureCount; ++j) {
      const std::string& n = names[j];
      if (n.find("_delta") != std::string::npos || n.find("_gamma") != std::string::npos ||
          n.find("g_parallel") == 0 || n.find("g_angsim") == 0) {
        v.push_back(j);
      }
    }
    return v;
  }();
  return idx;
}

PointCloud random_positions(Rng& rng, std::size_t n, bool quantized) {
  PointCloud pc;
  pc.positions.resize(n);
  pc.colors.assign(n, {128.0, 128.0, 128.0});
  for (auto& p : pc.positions) {
    p = {rng.uniform01(), rng.uniform01(), rng.uniform01()};
    if (quantized) {
      p.x = std::round(p.x * 16.0) / 16.0;
      p.y = std::round(p.y * 16.0) / 16.0;
      p.z = std::round(p.z * 16.0) / 16.0;
    }
  }
  return pc;
}

// ---- criterion 1: identity nulls --------------------------------------

Outcome identity_nulls() {
  const Shape shapes[] = {Shape::Plane, Shape::Sphere, Shape::CubeVolume, Shape::Torus,
                          Shape::ColoredGradientSphere};
  const double t0 = now_s();
  double worst_null = 0.0, worst_angsim = 1.0;
  const auto& names = feature_names();
  for (int s = 0; s < 5; ++s) {
    const PointCloud pc = make_reference(shapes[s], 10000, static_cast<uint64_t>(s + 1));
    const FeatureVector fv = extract_features(pc, pc, 81, hardware_threads());
    for (int j = 0; j < kFeatureCount; ++j) {
      if (names[j].rfind("g_angsim", 0) == 0) {
        worst_angsim = std::min(worst_angsim, fv.f[j]);
        if (fv.f[j] < 0.999) {
          return fail(std::string(shape_name(shapes[s])) + ": " + names[j] + " = " +
                      fmt("%.6f", fv.f[j]) + " < 0.999");
        }
      } else {
        worst_null = std::max(worst_null, std::fabs(fv.f[j]));
        if (std::fabs(fv.f[j]) > 1e-9) {
          return fail(std::string(shape_name(shapes[s])) + ": " + names[j] + " = " +
                      fmt("%.3g", fv.f[j]) + " exceeds 1e-9");
        }
      }
    }
  }
  const double dt = now_s() - t0;
  if (dt >= 30.0) return fail(fmt("%.1f s, budget is 30 s", dt));
  return pass(fmt("%.1f s, ", dt) + "max |null| " + fmt("%.2g", worst_null) + ", min angsim " +
              fmt("%.12g", worst_angsim));
}

// ---- criterion 2: oracle equivalence -----------------------------------

Outcome oracle_equivalence() {
  Rng rng(2024);

  // kd-tree pairing vs the O(n^2) reference on every query point.
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n_ref = 100 + rng.uniform_index(4901);
    const std::size_t n_dist = 100 + rng.uniform_index(4901);
    const bool quantized = trial % 3 == 0;  // grid snapping forces distance ties
    const PointCloud ref = random_positions(rng, n_ref, quantized);
    const PointCloud dist = random_positions(rng, n_dist, quantized);
    NeighborhoodPairer pairer(ref, dist, 81);
    NeighborhoodPair pair;
    std::vector<Neighbor> scratch, expect;
    for (std::size_t q = 0; q < n_ref; ++q) {
      pairer.pair_at(static_cast<int32_t>(q), pair, scratch);
      brute_force_knn(ref.positions, ref.positions[q], pairer.k_ref(), expect);
      if (pair.ref.size() != expect.size()) {
        return fail("pairing trial " + std::to_string(trial) + ": ref size mismatch");
      }
      for (std::size_t i = 0; i < expect.size(); ++i) {
        if (pair.ref[i] != expect[i].index) {
          return fail("pairing trial " + std::to_string(trial) + ": ref neighbor " +
                      std::to_string(i) + " differs from brute force at query " +
                      std::to_string(q));
        }
      }
      brute_force_knn(dist.positions, ref.positions[q], pairer.k_dist(), expect);
      for (std::size_t i = 0; i < expect.size(); ++i) {
        if (pair.dist[i] != expect[i].index) {
          return fail("pairing trial " + std::to_string(trial) + ": dist neighbor " +
                      std::to_string(i) + " differs from brute force at query " +
                      std::to_string(q));
        }
      }
    }
  }

  // Eigendecomposition reconstruction over mixed scales and ranks.
  double worst_recon = 0.0;
  for (int trial = 0; trial < 20000; ++trial) {
    const double scale = std::pow(10.0, rng.uniform01() * 12.0 - 6.0);
    Vec3 u{rng.normal(), rng.normal(), rng.normal()};
    Vec3 v{rng.normal(), rng.normal(), rng.normal()};
    Vec3 w{rng.normal(), rng.normal(), rng.normal()};
    Mat3 a{};
    const int rank = trial % 5;  // 0 => zero matrix, 1..3 => that rank, 4 => repeated spectrum
    auto add_outer = [&](const Vec3& x, double s) {
      const double c[3] = {x.x, x.y, x.z};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a.m[i][j] += s * c[i] * c[j];
    };
    if (rank >= 1) add_outer(u, scale);
    if (rank >= 2) add_outer(v, rank == 4 ? scale : scale * 0.1);
    if (rank >= 3) add_outer(w, rank == 4 ? scale : scale * 0.01);
    const EigenDecomposition eig = eigendecompose(a);
    double max_in = 1.0, err = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) max_in = std::max(max_in, std::fabs(a.m[i][j]));
    const double l[3] = {eig.lambda.x, eig.lambda.y, eig.lambda.z};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double r = 0.0;
        for (int m = 0; m < 3; ++m) r += eig.basis.m[i][m] * l[m] * eig.basis.m[j][m];
        err = std::max(err, std::fabs(r - a.m[i][j]));
      }
    }
    worst_recon = std::max(worst_recon, err / max_in);
    if (err > 1e-9 * max_in) {
      return fail("eigendecomposition trial " + std::to_string(trial) + ": reconstruction error " +
                  fmt("%.3g", err / max_in));
    }
  }

  // Pooled means against a long-double summation oracle.
  const std::size_t n_rows = 120000;
  PooledMean pooled(n_rows);
  std::vector<long double> oracle(kFeatureCount, 0.0L);
  std::array<double, kFeatureCount> col_scale{};
  for (int j = 0; j < kFeatureCount; ++j)
    col_scale[j] = std::pow(10.0, rng.uniform01() * 16.0 - 8.0);
  PredictorRow row{};
  for (std::size_t i = 0; i < n_rows; ++i) {
    for (int j = 0; j < kFeatureCount; ++j) {
      row[j] = rng.uniform01() * col_scale[j];
      oracle[j] += static_cast<long double>(row[j]);
    }
    pooled.add_row(i, row);
  }
  const PredictorRow mean = pooled.finalize();
  double worst_pool = 0.0;
  for (int j = 0; j < kFeatureCount; ++j) {
    const long double o = oracle[j] / static_cast<long double>(n_rows);
    const double rel = std::fabs(static_cast<double>((static_cast<long double>(mean[j]) - o) / o));
    worst_pool = std::max(worst_pool, rel);
    if (rel > 1e-12) {
      return fail("pooled mean column " + std::to_string(j) + ": relative error " +
                  fmt("%.3g", rel));
    }
  }

  return pass("50 exhaustive pairings, eigen recon " + fmt("%.2g", worst_recon) +
              ", pooling rel err " + fmt("%.2g", worst_pool));
}

// ---- criterion 3: algebraic invariants + degenerate fuzz ---------------

double trace_of(const Mat3& m) { return m.m[0][0] + m.m[1][1] + m.m[2][2]; }

bool row_in_bounds(const PredictorRow& r, std::string& why) {
  for (int j : bounded_indices()) {
    if (r[j] < 0.0 || r[j] > 1.0) {
      why = feature_names()[j] + " = " + fmt("%.17g", r[j]);
      return false;
    }
  }
  return true;
}

Outcome algebraic_invariants() {
  Rng rng(77);
  std::string why;

  // Identities on mapped neighborhoods of ordinary random clouds.
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 300 + rng.uniform_index(1701);
    PointCloud ref = random_positions(rng, n, false);
    PointCloud dist = random_positions(rng, n, false);
    for (auto& c : ref.colors) c = {rng.uniform01(), rng.uniform01(), rng.uniform01()};
    for (auto& c : dist.colors) c = {rng.uniform01(), rng.uniform01(), rng.uniform01()};
    ref.color_space = ColorSpace::YCbCr;
    dist.color_space = ColorSpace::YCbCr;
    NeighborhoodPairer pairer(ref, dist, 24);
    NeighborhoodPair pair;
    std::vector<Neighbor> scratch;
    MappedNeighborhood mapped;
    for (int s = 0; s < 50; ++s) {
      const auto q = static_cast<int32_t>(rng.uniform_index(n));
      pairer.pair_at(q, pair, scratch);
      map_pair(ref, dist, pair, mapped);
      const GeomDescriptors g = geometry_descriptors(mapped);

      // sumvar must equal the covariance trace, which the basis change keeps.
      const Mat3 cov_a = covariance_about(mapped.omega_ref, centroid_of(mapped.omega_ref));
      const Mat3 cov_b = covariance_about(mapped.omega_dist, centroid_of(mapped.omega_dist));
      const double lam_a =
          mapped.ref_basis.eig.lambda.x + mapped.ref_basis.eig.lambda.y +
          mapped.ref_basis.eig.lambda.z;
      if (std::fabs(g.sumvar_A - trace_of(cov_a)) > 1e-9 * std::max(1.0, trace_of(cov_a)) ||
          std::fabs(g.sumvar_A - lam_a) > 1e-9 * std::max(1.0, lam_a) ||
          std::fabs(g.sumvar_B - trace_of(cov_b)) > 1e-9 * std::max(1.0, trace_of(cov_b))) {
        return fail("trace identity violated on a random neighborhood");
      }
      if (std::fabs(g.aniso_A - (g.linear_A + g.planar_A)) > 1e-12 ||
          std::fabs(g.aniso_B - (g.linear_B + g.planar_B)) > 1e-12) {
        return fail("anisotropy != linearity + planarity");
      }

      std::vector<Vec3> rt(pair.ref.size()), dt(pair.dist.size());
      for (std::size_t m = 0; m < pair.ref.size(); ++m) rt[m] = ref.colors[pair.ref[m]];
      for (std::size_t m = 0; m < pair.dist.size(); ++m) dt[m] = dist.colors[pair.dist[m]];
      const PredictorRow r = point_predictors(g, texture_descriptors(rt, dt));
      if (!finite_row(r)) return fail("NaN/Inf on a random neighborhood");
      if (!row_in_bounds(r, why)) return fail("bounded predictor escaped [0,1]: " + why);
    }
  }

  // Degenerate fuzz corpus: coincident / collinear / coplanar / single-point
  // neighborhoods, with constant-color variants, on both sides of the pair.
  std::size_t checked = 0;
  int iter = 0;
  while (checked < 1000 && iter < 4000) {
    const int kind = iter % 4;
    ++iter;
    const std::size_t n = 12 + rng.uniform_index(20);
    PointCloud micro;
    micro.color_space = ColorSpace::YCbCr;
    const Vec3 base{rng.uniform01(), rng.uniform01(), rng.uniform01()};
    Vec3 d1{rng.normal(), rng.normal(), rng.normal()};
    Vec3 d2{rng.normal(), rng.normal(), rng.normal()};
    const bool flat_color = iter % 3 == 0;
    for (std::size_t i = 0; i < n; ++i) {
      Vec3 p = base;
      const double t = rng.uniform01() - 0.5;
      const double s = rng.uniform01() - 0.5;
      if (kind == 1) p = base + d1 * t;                    // collinear
      if (kind == 2) p = base + d1 * t + d2 * s;           // coplanar
      if (kind == 3 && i > 0) break;                       // single point
      micro.positions.push_back(p);
      micro.colors.push_back(flat_color ? Vec3{0.5, 0.5, 0.5}
                                        : Vec3{rng.uniform01(), rng.uniform01(), rng.uniform01()});
    }

    // Hand-built index lists exercise truly coincident neighborhoods (the
    // extraction pipeline would merge them away first).
    NeighborhoodPair pair;
    const auto sz = static_cast<int32_t>(micro.size());
    for (int32_t i = 0; i < std::min<int32_t>(sz, 8); ++i) {
      pair.ref.push_back(kind == 0 ? 0 : i % sz);
      pair.dist.push_back(i % sz);
    }
    if (kind == 0) pair.dist.assign(pair.ref.size(), 0);
    MappedNeighborhood mapped;
    map_pair(micro, micro, pair, mapped);
    const GeomDescriptors g = geometry_descriptors(mapped);
    std::vector<Vec3> rt, dt;
    for (int32_t i : pair.ref) rt.push_back(micro.colors[i]);
    for (int32_t i : pair.dist) dt.push_back(micro.colors[i]);
    const PredictorRow direct = point_predictors(g, texture_descriptors(rt, dt));
    if (!finite_row(direct)) return fail("NaN/Inf on handcrafted degenerate neighborhood");
    if (!row_in_bounds(direct, why)) {
      return fail("degenerate neighborhood escaped [0,1]: " + why);
    }
    ++checked;

    // Same content through the full pipeline (merge + pairing + descriptors).
    PredictorMatrix rows;
    extract_features(micro, micro, 9, 1, &rows);
    for (const auto& r : rows.rows) {
      if (!finite_row(r)) return fail("NaN/Inf out of the pipeline on degenerate input");
      if (!row_in_bounds(r, why)) return fail("pipeline predictor escaped [0,1]: " + why);
      ++checked;
    }
  }
  return pass(std::to_string(checked) + " degenerate neighborhoods, all finite and bounded");
}

// ---- criterion 4: distortion response + learned ranking ----------------

Outcome monotonic_response() {
  const double t0 = now_s();
  struct Case {
    DistortionKind kind;
    const char* feature;
    std::array<double, 4> levels;
  };
  const Case cases[] = {
      {DistortionKind::GeomGaussNoise, "g_e_alpha", {0.002, 0.005, 0.012, 0.03}},
      {DistortionKind::GeomQuantize, "g_e_alpha", {0.01, 0.025, 0.06, 0.15}},
      {DistortionKind::Downsample, "g_e_alpha", {0.8, 0.55, 0.35, 0.2}},
      {DistortionKind::ColorGaussNoise, "t_sumvar_delta", {0.02, 0.05, 0.12, 0.3}},
      {DistortionKind::ColorQuantize, "t_sumvar_delta", {0.08, 0.18, 0.35, 0.6}},
  };
  const auto& names = feature_names();
  const int threads = hardware_threads();

  std::vector<PointCloud> refs;
  for (int t = 1; t <= 20; ++t)
    refs.push_back(make_reference(Shape::ColoredGradientSphere, 2500, 100 + t));

  std::string counts;
  for (const Case& c : cases) {
    int col = -1;
    for (int j = 0; j < kFeatureCount; ++j)
      if (names[j] == c.feature) col = j;
    int mono = 0;
    for (int t = 1; t <= 20; ++t) {
      double prev = -1.0;
      bool increasing = true;
      for (double level : c.levels) {
        const PointCloud dist =
            apply_distortion(refs[t - 1], {c.kind, level, static_cast<uint64_t>(900 + t)});
        const double v = extract_features(refs[t - 1], dist, 32, threads).f[col];
        increasing = increasing && v > prev;
        prev = v;
      }
      mono += increasing;
    }
    counts += std::string(counts.empty() ? "" : " ") + distortion_name(c.kind) + ":" +
              std::to_string(mono) + "/20";
    if (mono < 19) {
      return fail(std::string(distortion_name(c.kind)) + ": " + c.feature + " monotone in only " +
                  std::to_string(mono) + "/20 trials");
    }
  }

  // Planted-MOS dataset: six contents, every kind at the four levels above,
  // MOS a fixed decreasing function of the level index.
  Matrix X;
  std::vector<double> y;
  std::vector<int> groups;
  for (int content = 0; content < 6; ++content) {
    const PointCloud ref =
        make_reference(Shape::ColoredGradientSphere, 2500, static_cast<uint64_t>(content + 1));
    for (const Case& c : cases) {
      for (int j = 0; j < 4; ++j) {
        const PointCloud dist = apply_distortion(
            ref, {c.kind, c.levels[static_cast<std::size_t>(j)],
                  static_cast<uint64_t>(7000 + content * 100 + j)});
        const FeatureVector fv = extract_features(ref, dist, 32, threads);
        X.emplace_back(fv.f.begin(), fv.f.end());
        y.push_back(4.6 - 1.1 * j);
        groups.push_back(content);
      }
    }
  }
  BenchOptions opt;
  opt.k = 32;
  opt.forest.n_trees = 60;
  opt.forest.seed = 1;
  opt.folds = 3;
  opt.seed = 9;
  opt.threads = threads;
  opt.rfe = true;
  const BenchReport report = benchmark_features(X, y, groups, opt);
  const double dt = now_s() - t0;
  if (report.srocc_mean < 0.90) {
    return fail("held-out srocc " + fmt("%.3f", report.srocc_mean) + " < 0.90 over " +
                std::to_string(report.n_splits_run) + " splits");
  }
  if (dt >= 300.0) return fail(fmt("%.0f s, budget is 300 s", dt));
  return pass(counts + ", held-out srocc " + fmt("%.3f", report.srocc_mean) + ", " +
              fmt("%.0f s", dt));
}

// ---- criterion 5: split protocol ----------------------------------------

Outcome split_counts() {
  const struct {
    int contents;
    std::size_t expect;
  } rows[] = {{8, 28}, {9, 36}, {20, 4845}};
  for (const auto& r : rows) {
    const SplitPlan plan = generate_splits(r.contents, 0.2);
    if (plan.splits.size() != r.expect) {
      return fail(std::to_string(r.contents) + " contents gave " +
                  std::to_string(plan.splits.size()) + " splits, expected " +
                  std::to_string(r.expect));
    }
    std::set<std::vector<int>> seen;
    for (const auto& [train, test] : plan.splits) {
      if (train.size() + test.size() != static_cast<std::size_t>(r.contents) ||
          !seen.insert(test).second) {
        return fail("split enumeration is not a disjoint exact cover");
      }
    }
  }
  return pass("28 / 36 / 4845 for 8 / 9 / 20 contents");
}

// ---- criterion 6: dataset-gated reproduction ----------------------------

Outcome dataset_reproduction() {
  const char* root = std::getenv("PCQA_DATASETS");
  if (root == nullptr) {
    return {"SKIP", "set PCQA_DATASETS to a directory with mpccd.csv / sjtu.csv / wpc.csv"};
  }
  const struct {
    const char* file;
    double target, window;
    int split_cap;
  } rows[] = {{"mpccd.csv", 0.943, 0.05, 0}, {"sjtu.csv", 0.865, 0.06, 0},
              {"wpc.csv", 0.857, 0.05, 200}};
  std::string detail;
  int ran = 0;
  for (const auto& r : rows) {
    const fs::path manifest = fs::path(root) / r.file;
    if (!fs::exists(manifest)) {
      detail += std::string(detail.empty() ? "" : ", ") + r.file + " absent";
      continue;
    }
    const SubjectiveDataset ds = load_manifest(manifest.string());
    BenchOptions opt;
    opt.k = 81;
    opt.forest.n_trees = 100;
    opt.forest.seed = 1;
    opt.folds = 5;
    opt.split_cap = r.split_cap;
    opt.seed = 17;
    opt.threads = hardware_threads();
    opt.base_dir = root;
    opt.cache_dir = (fs::path(root) / "feature_cache").string();
    const BenchReport rep = benchmark(ds, opt);
    ++ran;
    detail += std::string(detail.empty() ? "" : ", ") + r.file + " srocc " +
              fmt("%.3f", rep.srocc_mean);
    if (std::fabs(rep.srocc_mean - r.target) > r.window) {
      return fail(std::string(r.file) + ": srocc " + fmt("%.3f", rep.srocc_mean) +
                  " outside " + fmt("%.3f", r.target) + " +/- " + fmt("%.2f", r.window));
    }
  }
  if (ran == 0) return {"SKIP", detail};
  return pass(detail);
}

// ---- criterion 7: determinism across reruns and thread counts ----------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const char* cli = std::getenv("PCQA_CLI_PATH");
#ifdef PCQA_CLI_PATH
  if (cli == nullptr) cli = PCQA_CLI_PATH;
#endif
  if (cli == nullptr) return {"SKIP", "PCQA_CLI_PATH not set (CLI binary unavailable)"};
  const fs::path dir = fs::temp_directory_path() / ("pcqa_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const auto run = [&](const std::string& args) {
    const std::string cmd = std::string(cli) + " " + args + " > " + (dir / "stdout.txt").string() +
                            " 2> " + (dir / "stderr.txt").string();
    return std::system(cmd.c_str());
  };
  const auto path = [&](const char* name) { return (dir / name).string(); };

  Outcome out = pass("");
  do {
    // Synthesis is byte-stable across reruns.
    if (run("synth --shape colored_gradient_sphere --n 3000 --seed 21 --format binary --out " +
            path("ref.ply")) != 0 ||
        run("synth --shape colored_gradient_sphere --n 3000 --seed 21 --format binary "
            "--distort geom_gauss_noise:0.01 --out " +
            path("dist.ply")) != 0 ||
        run("synth --shape colored_gradient_sphere --n 3000 --seed 21 --format binary --out " +
            path("ref2.ply")) != 0) {
      out = fail("synth invocation failed");
      break;
    }
    if (slurp(path("ref.ply")) != slurp(path("ref2.ply"))) {
      out = fail("synth rerun changed ref.ply");
      break;
    }

    // Extraction is byte-stable across thread counts.
    bool bad = false;
    for (int threads : {1, 3, 8}) {
      if (run("extract " + path("ref.ply") + " " + path("dist.ply") + " -k 81 --threads " +
              std::to_string(threads) + " --out " + path("feat.csv")) != 0) {
        out = fail("extract invocation failed");
        bad = true;
        break;
      }
      fs::rename(path("feat.csv"), path(("feat" + std::to_string(threads) + ".csv").c_str()));
    }
    if (bad) break;
    const std::string f1 = slurp(path("feat1.csv"));
    if (f1.empty() || f1 != slurp(path("feat3.csv")) || f1 != slurp(path("feat8.csv"))) {
      out = fail("feature csv differs across --threads 1/3/8");
      break;
    }

    // Training is byte-stable across reruns; prediction across thread counts.
    {
      std::ofstream mos(path("mos.csv"));
      mos << "dist_id,mos\ndist,3.2\n";
    }
    for (int rep : {1, 2}) {
      if (run("train --features " + path("feat1.csv") + " --mos " + path("mos.csv") +
              " --trees 25 --seed 3 --no-rfe --out " + path("model.json")) != 0) {
        out = fail("train invocation failed");
        bad = true;
        break;
      }
      fs::rename(path("model.json"), path(("model" + std::to_string(rep) + ".json").c_str()));
    }
    if (bad) break;
    if (slurp(path("model1.json")) != slurp(path("model2.json"))) {
      out = fail("train rerun changed the model");
      break;
    }
    for (int threads : {1, 4}) {
      if (run("predict --model " + path("model1.json") + " " + path("ref.ply") + " " +
              path("dist.ply") + " -k 32 --threads " + std::to_string(threads)) != 0) {
        out = fail("predict invocation failed");
        bad = true;
        break;
      }
      fs::copy_file(path("stdout.txt"), path(("scores" + std::to_string(threads) + ".txt").c_str()),
                    fs::copy_options::overwrite_existing);
    }
    if (bad) break;
    if (slurp(path("scores1.txt")).empty() ||
        slurp(path("scores1.txt")) != slurp(path("scores4.txt"))) {
      out = fail("prediction differs across --threads 1/4");
      break;
    }
    out = pass("synth rerun, extract threads 1/3/8, train rerun, predict threads 1/4: byte-identical");
  } while (false);

  std::error_code ec;
  fs::remove_all(dir, ec);
  return out;
}

// ---- criterion 8: throughput report -------------------------------------

Outcome throughput_report() {
  const PointCloud ref = make_reference(Shape::ColoredGradientSphere, 100000, 11);
  const PointCloud dist = apply_distortion(ref, {DistortionKind::GeomGaussNoise, 0.005, 13});
  StageTimings st;
  extract_features(ref, dist, 81, hardware_threads(), nullptr, &st);
  const std::string detail = "100k-point pair at K=81 on " +
                             std::to_string(hardware_threads()) + " thread(s): " +
                             fmt("%.1f s", st.total_s) + " (preprocess " +
                             fmt("%.2f", st.preprocess_s) + ", pairing " +
                             fmt("%.2f", st.pairing_s) + ", descriptors " +
                             fmt("%.2f", st.descriptors_s) + ", pooling " +
                             fmt("%.2f", st.pooling_s) + "); budget 60 s";
  if (st.total_s >= 60.0) return {"WARN", detail};
  return pass(detail);
}

}  // namespace

int main() {
  struct Entry {
    const char* label;
    Outcome (*fn)();
  };
  const Entry entries[] = {
      {"identity feature nulls (5 shapes x 10k, K=81)", identity_nulls},
      {"exact pairing / eigen / pooling oracles", oracle_equivalence},
      {"algebraic invariants + degenerate fuzz", algebraic_invariants},
      {"distortion response + learned ranking", monotonic_response},
      {"exhaustive content-split enumeration", split_counts},
      {"public dataset reproduction", dataset_reproduction},
      {"rerun + thread-count byte determinism", determinism},
      {"throughput report", throughput_report},
  };
  int failures = 0;
  for (std::size_t i = 0; i < std::size(entries); ++i) {
    Outcome o;
    try {
      o = entries[i].fn();
    } catch (const std::exception& e) {
      o = fail(std::string("unexpected exception: ") + e.what());
    }
    std::string line = "[" + std::to_string(i + 1) + "] " + entries[i].label + " ";
    while (line.size() < 56) line += '.';
    std::printf("%s %s%s%s\n", line.c_str(), o.status.c_str(), o.detail.empty() ? "" : "  -- ",
                o.detail.c_str());
    std::fflush(stdout);
    if (o.status == "FAIL") ++failures;
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures;
}

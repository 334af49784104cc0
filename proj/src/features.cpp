#include "pcqa/features.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "pcqa/csv.hpp"
#include "pcqa/errors.hpp"
#include "pcqa/hash.hpp"
#include "pcqa/local_pca.hpp"
#include "pcqa/neighborhood.hpp"
#include "pcqa/parallel.hpp"

namespace pcqa {

double dist_alpha(const Vec3& d) { return norm(d); }

double dist_beta(double projected) { return std::fabs(projected); }

double dist_gamma(double var_a, double var_b, double cross_cov) {
  const double prod = var_a * var_b;
  return std::fabs(prod - cross_cov * cross_cov) / (prod + kDistanceEps);
}

double dist_delta(double a, double b) {
  return std::fabs(a - b) / (std::fabs(a) + std::fabs(b) + kDistanceEps);
}

const std::array<std::string, kFeatureCount>& feature_names() {
  static const std::array<std::string, kFeatureCount> names = {
      "g_e_alpha",
      "g_eps_beta_1", "g_eps_beta_2", "g_eps_beta_3",
      "g_origin_alpha",
      "g_origin_beta_1", "g_origin_beta_2", "g_origin_beta_3",
      "g_mean_alpha",
      "g_mean_beta_1", "g_mean_beta_2", "g_mean_beta_3",
      "g_var_delta_1", "g_var_delta_2", "g_var_delta_3",
      "g_sumvar_delta",
      "g_cov_gamma_1", "g_cov_gamma_2", "g_cov_gamma_3",
      "g_omni_delta",
      "g_entropy_delta",
      "g_aniso_delta",
      "g_planar_delta",
      "g_linear_delta",
      "g_scatter_delta",
      "g_curv_delta",
      "g_parallel_1", "g_parallel_2", "g_parallel_3",
      "g_angsim_1", "g_angsim_2", "g_angsim_3",
      "t_mean_delta_y", "t_mean_delta_cb", "t_mean_delta_cr",
      "t_var_delta_y", "t_var_delta_cb", "t_var_delta_cr",
      "t_sumvar_delta",
      "t_cov_gamma_y", "t_cov_gamma_cb", "t_cov_gamma_cr",
      "t_omni_delta",
      "t_entropy_delta",
  };
  return names;
}

PredictorRow point_predictors(const GeomDescriptors& g, const TexDescriptors& t) {
  PredictorRow r{};
  int i = 0;
  r[i++] = dist_alpha(g.e);
  for (int m = 0; m < 3; ++m) r[i++] = dist_beta(g.eps[m]);
  r[i++] = std::fabs(g.origin_ref_norm - g.origin_dist_norm);
  for (int m = 0; m < 3; ++m)
    r[i++] = std::fabs(std::fabs(g.origin_ref_proj[m]) - std::fabs(g.origin_dist_proj[m]));
  r[i++] = dist_alpha(g.mu_B);
  for (int m = 0; m < 3; ++m) r[i++] = dist_beta(g.mu_B[m]);
  for (int m = 0; m < 3; ++m) r[i++] = dist_delta(g.var_A[m], g.var_B[m]);
  r[i++] = dist_delta(g.sumvar_A, g.sumvar_B);
  for (int m = 0; m < 3; ++m) r[i++] = dist_gamma(g.var_A[m], g.var_B[m], g.cross_cov_diag[m]);
  r[i++] = dist_delta(g.omni_A, g.omni_B);
  r[i++] = dist_delta(g.entropy_A, g.entropy_B);
  r[i++] = dist_delta(g.aniso_A, g.aniso_B);
  r[i++] = dist_delta(g.planar_A, g.planar_B);
  r[i++] = dist_delta(g.linear_A, g.linear_B);
  r[i++] = dist_delta(g.scatter_A, g.scatter_B);
  r[i++] = dist_delta(g.curv_A, g.curv_B);
  for (int m = 0; m < 3; ++m) r[i++] = g.parallel[m];
  for (int m = 0; m < 3; ++m) r[i++] = g.angsim[m];
  for (int c = 0; c < 3; ++c) r[i++] = dist_delta(t.mean_A[c], t.mean_B[c]);
  for (int c = 0; c < 3; ++c) r[i++] = dist_delta(t.var_A[c], t.var_B[c]);
  r[i++] = dist_delta(t.sumvar_A, t.sumvar_B);
  for (int c = 0; c < 3; ++c) r[i++] = dist_gamma(t.var_A[c], t.var_B[c], t.cross_cov_diag[c]);
  r[i++] = dist_delta(t.omni_A, t.omni_B);
  r[i++] = dist_delta(t.entropy_A, t.entropy_B);
  return r;
}

PooledMean::PooledMean(std::size_t n_rows) : n_(n_rows) {
  blocks_.resize((n_rows + kBlock - 1) / kBlock);
}

void PooledMean::add_row(std::size_t row_index, const PredictorRow& row) {
  auto& block = blocks_[row_index / kBlock];
  for (int j = 0; j < kFeatureCount; ++j) {
    Accum& a = block[j];
    const double x = row[j];
    const double t = a.sum + x;
    if (std::fabs(a.sum) >= std::fabs(x)) {
      a.comp += (a.sum - t) + x;
    } else {
      a.comp += (x - t) + a.sum;
    }
    a.sum = t;
  }
}

PredictorRow PooledMean::finalize() const {
  PredictorRow out{};
  for (int j = 0; j < kFeatureCount; ++j) {
    double sum = 0.0, comp = 0.0;
    for (const auto& block : blocks_) {
      const double x = block[j].sum + block[j].comp;
      const double t = sum + x;
      if (std::fabs(sum) >= std::fabs(x)) {
        comp += (sum - t) + x;
      } else {
        comp += (x - t) + sum;
      }
      sum = t;
    }
    out[j] = (sum + comp) / static_cast<double>(n_);
  }
  return out;
}

PredictorRow pool(const PredictorMatrix& pm) {
  if (pm.rows.empty()) throw BadArgument("cannot pool an empty predictor matrix");
  PooledMean pooled(pm.rows.size());
  for (std::size_t i = 0; i < pm.rows.size(); ++i) pooled.add_row(i, pm.rows[i]);
  return pooled.finalize();
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

PointCloud preprocess(const PointCloud& pc) {
  PointCloud merged = merge_duplicates(pc);
  if (merged.color_space == ColorSpace::RGB8) return rgb_to_ycbcr(merged);
  return merged;
}

}  // namespace

FeatureVector extract_features(const PointCloud& ref, const PointCloud& dist, int k, int threads,
                               PredictorMatrix* dump_rows, StageTimings* timings) {
  const auto t_start = std::chrono::steady_clock::now();
  if (threads < 1) threads = 1;

  auto t0 = std::chrono::steady_clock::now();
  const PointCloud a = preprocess(ref);
  const PointCloud b = preprocess(dist);
  const double preprocess_s = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  NeighborhoodPairer pairer(a, b, k);
  const double pairing_s = seconds_since(t0);

  const std::size_t n = a.size();
  if (dump_rows) {
    dump_rows->layout_version = kLayoutVersion;
    dump_rows->rows.resize(n);
  }

  t0 = std::chrono::steady_clock::now();
  PooledMean pooled(n);
  const std::size_t n_blocks = (n + PooledMean::kBlock - 1) / PooledMean::kBlock;
  parallel_chunks(n_blocks, threads, [&](std::size_t block_begin, std::size_t block_end) {
    std::vector<Neighbor> scratch;
    NeighborhoodPair pair;
    MappedNeighborhood mapped;
    std::vector<Vec3> ref_tex, dist_tex;
    for (std::size_t blk = block_begin; blk < block_end; ++blk) {
      const std::size_t lo = blk * PooledMean::kBlock;
      const std::size_t hi = std::min(n, lo + PooledMean::kBlock);
      for (std::size_t idx = lo; idx < hi; ++idx) {
        pairer.pair_at(static_cast<int32_t>(idx), pair, scratch);
        map_pair(a, b, pair, mapped);
        const GeomDescriptors g = geometry_descriptors(mapped);
        ref_tex.resize(pair.ref.size());
        for (std::size_t m = 0; m < pair.ref.size(); ++m) ref_tex[m] = a.colors[pair.ref[m]];
        dist_tex.resize(pair.dist.size());
        for (std::size_t m = 0; m < pair.dist.size(); ++m) dist_tex[m] = b.colors[pair.dist[m]];
        const TexDescriptors t = texture_descriptors(ref_tex, dist_tex);
        const PredictorRow row = point_predictors(g, t);
        pooled.add_row(idx, row);
        if (dump_rows) dump_rows->rows[idx] = row;
      }
    }
  });
  const double descriptors_s = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  FeatureVector fv;
  fv.f = pooled.finalize();
  fv.k_requested = k;
  fv.k_ref = pairer.k_ref();
  fv.k_dist = pairer.k_dist();
  const double pooling_s = seconds_since(t0);

  if (timings) {
    timings->preprocess_s = preprocess_s;
    timings->pairing_s = pairing_s;
    timings->descriptors_s = descriptors_s;
    timings->pooling_s = pooling_s;
    timings->total_s = seconds_since(t_start);
  }
  return fv;
}

std::string feature_csv_header() {
  std::string h = "ref_id,dist_id,k,layout_version";
  for (const auto& name : feature_names()) {
    h += ',';
    h += name;
  }
  return h;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string feature_csv_row(const FeatureVector& fv) {
  std::string row = fv.ref_id + ',' + fv.dist_id + ',' + std::to_string(fv.k_requested) + ',' +
                    std::to_string(kLayoutVersion);
  for (double v : fv.f) {
    row += ',';
    row += format_double(v);
  }
  return row;
}

std::vector<FeatureVector> read_feature_csv(const std::string& path) {
  const auto rows = read_csv(path);
  if (rows.empty()) throw BadArgument("empty feature file: " + path);
  const auto& header = rows.front();
  if (header.size() != 4 + kFeatureCount || header[0] != "ref_id") {
    throw BadArgument("unrecognized feature file header in " + path);
  }
  const auto& names = feature_names();
  for (int j = 0; j < kFeatureCount; ++j) {
    if (header[4 + j] != names[j]) {
      throw LayoutMismatch("feature column " + std::to_string(j + 1) + " is '" + header[4 + j] +
                           "', expected '" + names[j] + "' in " + path);
    }
  }
  std::vector<FeatureVector> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& fields = rows[r];
    if (fields.size() != 4 + kFeatureCount) {
      throw BadArgument("feature row " + std::to_string(r) + " has " +
                        std::to_string(fields.size()) + " fields in " + path);
    }
    FeatureVector fv;
    fv.ref_id = fields[0];
    fv.dist_id = fields[1];
    fv.k_requested = std::stoi(fields[2]);
    if (std::stoi(fields[3]) != kLayoutVersion) {
      throw LayoutMismatch("feature file " + path + " uses layout_version " + fields[3]);
    }
    for (int j = 0; j < kFeatureCount; ++j) fv.f[j] = std::stod(fields[4 + j]);
    out.push_back(std::move(fv));
  }
  return out;
}

std::string feature_cache_name(uint64_t ref_hash, uint64_t dist_hash, int k) {
  return "pcqa_" + hex16(ref_hash) + "_" + hex16(dist_hash) + "_k" + std::to_string(k) + "_v" +
         std::to_string(kLayoutVersion) + ".txt";
}

bool load_cached_features(const std::string& dir, const std::string& name, FeatureVector& out) {
  const std::filesystem::path p = std::filesystem::path(dir) / name;
  std::ifstream in(p);
  if (!in) return false;
  std::string magic;
  int layout = 0;
  in >> magic >> layout;
  if (magic != "pcqa-feature-cache" || layout != kLayoutVersion) return false;
  in >> out.k_requested >> out.k_ref >> out.k_dist;
  for (int j = 0; j < kFeatureCount; ++j) {
    if (!(in >> out.f[j])) return false;
  }
  return true;
}

void store_cached_features(const std::string& dir, const std::string& name,
                           const FeatureVector& fv) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const std::filesystem::path p = std::filesystem::path(dir) / name;
  std::ofstream out(p);
  if (!out) return;
  out << "pcqa-feature-cache " << kLayoutVersion << "\n";
  out << fv.k_requested << " " << fv.k_ref << " " << fv.k_dist << "\n";
  for (int j = 0; j < kFeatureCount; ++j) {
    out << format_double(fv.f[j]) << (j + 1 == kFeatureCount ? "\n" : " ");
  }
}

}  // namespace pcqa

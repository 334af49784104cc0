#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pcqa/descriptors.hpp"
#include "pcqa/point_cloud.hpp"

namespace pcqa {

constexpr int kFeatureCount = 44;
constexpr int kLayoutVersion = 1;
// Relative-difference stabilizer shared by the delta and gamma distances.
constexpr double kDistanceEps = 1e-6;

double dist_alpha(const Vec3& d);
double dist_beta(double projected);
// Relative covariance distance; Q is the squared cross-covariance diagonal.
double dist_gamma(double var_a, double var_b, double cross_cov);
double dist_delta(double a, double b);

using PredictorRow = std::array<double, kFeatureCount>;

struct PredictorMatrix {
  std::vector<PredictorRow> rows;
  int layout_version = kLayoutVersion;
};

struct FeatureVector {
  PredictorRow f{};
  int k_requested = 0;
  int k_ref = 0;
  int k_dist = 0;
  std::string ref_id;
  std::string dist_id;
};

struct StageTimings {
  double preprocess_s = 0.0;
  double pairing_s = 0.0;
  double descriptors_s = 0.0;
  double pooling_s = 0.0;
  double total_s = 0.0;
};

// Canonical names for the 44-entry layout; index order is the layout.
const std::array<std::string, kFeatureCount>& feature_names();

PredictorRow point_predictors(const GeomDescriptors& g, const TexDescriptors& t);

// Fixed-block compensated column means: bit-identical results for any thread
// count as long as rows inside one block are added in index order.
class PooledMean {
 public:
  static constexpr std::size_t kBlock = 4096;

  explicit PooledMean(std::size_t n_rows);
  void add_row(std::size_t row_index, const PredictorRow& row);
  PredictorRow finalize() const;

 private:
  struct Accum {
    double sum = 0.0;
    double comp = 0.0;
  };
  std::size_t n_ = 0;
  std::vector<std::array<Accum, kFeatureCount>> blocks_;
};

PredictorRow pool(const PredictorMatrix& pm);

// Full pipeline: merge duplicates, convert colors, pair neighborhoods, map,
// compute descriptors and predictors, pool. Deterministic for any `threads`.
FeatureVector extract_features(const PointCloud& ref, const PointCloud& dist, int k,
                               int threads = 1, PredictorMatrix* dump_rows = nullptr,
                               StageTimings* timings = nullptr);

// Feature CSV plumbing (header + one row per pair).
std::string feature_csv_header();
std::string feature_csv_row(const FeatureVector& fv);
std::vector<FeatureVector> read_feature_csv(const std::string& path);

// On-disk single-pair cache keyed by content hashes, K and layout version.
std::string feature_cache_name(uint64_t ref_hash, uint64_t dist_hash, int k);
bool load_cached_features(const std::string& dir, const std::string& name, FeatureVector& out);
void store_cached_features(const std::string& dir, const std::string& name,
                           const FeatureVector& fv);

}  // namespace pcqa

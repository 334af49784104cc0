#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pcqa/features.hpp"
#include "pcqa/random_forest.hpp"

namespace pcqa {

// Pearson correlation; throws ConstantInput when either side has zero
// variance. No score mapping is applied before the correlation.
double plcc(std::span<const double> x, std::span<const double> y);

// Spearman correlation with average ranks on ties.
double srocc(std::span<const double> x, std::span<const double> y);

// Average ranks (1-based) with ties sharing their mean rank.
std::vector<double> average_ranks(std::span<const double> x);

struct KrasulaResult {
  double auc_diff_sim = 0.0;
  double cc_better_worse = 0.0;
  std::size_t n_different = 0;
  std::size_t n_similar = 0;
};

// Pairwise analysis: pairs are "different" when the MOS gap clears the
// 1.96-sigma CI test (when every stimulus has a CI) or a plain threshold
// otherwise; delta_mos <= 0 selects 10% of the observed MOS range. AUC ranks
// |pred_i - pred_j| as a detector of different pairs; CC is the fraction of
// different pairs ordered the same way by prediction and MOS.
KrasulaResult krasula_analysis(std::span<const double> pred, std::span<const double> mos,
                               std::span<const double> ci = {}, double delta_mos = 0.0);

struct DatasetEntry {
  std::string ref_id;
  std::string dist_id;
  std::string ref_path;
  std::string dist_path;
  double mos = 0.0;
  double ci = 0.0;
  bool has_ci = false;
};

struct SubjectiveDataset {
  std::vector<DatasetEntry> entries;
  std::vector<std::string> contents;  // distinct ref_ids, first-appearance order

  int content_index(const std::string& ref_id) const;
  bool all_have_ci() const;
};

// Manifest CSV: ref_id,dist_id,ref_path,dist_path,mos[,ci]. Lines starting
// with '#' and a leading header row are skipped.
SubjectiveDataset load_manifest(const std::string& path);

struct SplitPlan {
  // Each split: (train content indices, test content indices), both sorted.
  std::vector<std::pair<std::vector<int>, std::vector<int>>> splits;
};

// All C(n, t) content splits with t = round(test_fraction * n), min 1,
// enumerated in lexicographic order of the test combination.
SplitPlan generate_splits(int n_contents, double test_fraction);

struct SplitResult {
  int split_index = 0;
  double srocc = 0.0;
  double plcc = 0.0;
  int n_test = 0;
};

struct BenchOptions {
  int k = 81;
  ForestParams forest;
  int folds = 5;
  int split_cap = 0;  // 0 = all splits
  uint64_t seed = 0;
  int threads = 1;
  double test_fraction = 0.2;
  double delta_mos = 0.0;  // 0 = auto (10% of MOS range)
  bool rfe = true;
  std::string cache_dir;
  std::string base_dir;  // resolves relative manifest paths
};

struct BenchReport {
  std::vector<SplitResult> per_split;
  double srocc_mean = 0.0, srocc_std = 0.0;
  double plcc_mean = 0.0, plcc_std = 0.0;
  double auc_diff_sim = 0.0, cc_better_worse = 0.0;
  int n_splits_total = 0;
  int n_splits_run = 0;
  double extract_s = 0.0, train_s = 0.0, eval_s = 0.0;
  StageTimings stage;  // summed extraction stage timings
  std::string notes;
};

// Extracts (or loads cached) features for every manifest entry.
void dataset_features(const SubjectiveDataset& ds, const BenchOptions& opt, Matrix& X,
                      std::vector<double>& y, std::vector<int>& groups, StageTimings* stage_sum,
                      std::vector<double>* ci = nullptr);

BenchReport benchmark(const SubjectiveDataset& ds, const BenchOptions& opt);

// Split-protocol evaluation over a prebuilt feature table (no file I/O).
BenchReport benchmark_features(const Matrix& X, const std::vector<double>& y,
                               const std::vector<int>& groups, const BenchOptions& opt,
                               const std::vector<double>& ci = {});

}  // namespace pcqa

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pcqa/features.hpp"

namespace pcqa {

struct ForestParams {
  int n_trees = 100;
  int max_depth = -1;  // -1 = grow until pure / min_leaf
  int min_leaf = 1;
  double features_per_split = 1.0;  // fraction of active features tried per split
  bool bootstrap = true;
  uint64_t seed = 0;
};

struct TreeNode {
  int32_t feature = -1;  // canonical feature index; -1 marks a leaf
  double threshold = 0.0;
  int32_t left = -1;
  int32_t right = -1;
  double value = 0.0;  // leaf mean
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // node 0 is the root

  double predict(const double* x) const {
    int32_t id = 0;
    while (nodes[id].feature >= 0) {
      id = x[nodes[id].feature] <= nodes[id].threshold ? nodes[id].left : nodes[id].right;
    }
    return nodes[id].value;
  }
};

struct QualityModel {
  std::vector<RegressionTree> trees;
  std::vector<bool> selected_mask;   // one flag per feature column
  std::vector<double> importances;   // normalized impurity decrease
  ForestParams params;
  int layout_version = kLayoutVersion;
  uint64_t training_fingerprint = 0;
};

using Matrix = std::vector<std::vector<double>>;  // row-major n x d

// Fits a seeded random forest on the columns enabled in `mask` (empty mask =
// all columns). Trees store canonical column indices, so prediction always
// takes full-width rows.
QualityModel train_forest(const Matrix& X, const std::vector<double>& y, const ForestParams& p,
                          const std::vector<bool>& mask = {});

double predict(const QualityModel& m, const double* x, std::size_t width);
double predict(const QualityModel& m, const std::vector<double>& x);
std::vector<double> predict_many(const QualityModel& m, const Matrix& X);

struct RfeTrace {
  std::vector<int> subset_sizes;
  std::vector<double> cv_scores;
  std::vector<int> eliminated;  // feature removed after scoring each size
};

// Recursive feature elimination: score each subset size with grouped k-fold
// out-of-fold SROCC, drop the least important feature, keep the best size
// (ties prefer fewer features), then refit on all rows. `groups` labels each
// row's source content; empty groups fall back to contiguous folds.
QualityModel rfe_select(const Matrix& X, const std::vector<double>& y,
                        const std::vector<int>& groups, const ForestParams& p, int folds = 5,
                        RfeTrace* trace = nullptr);

// Deterministic fold assignment: greedy balance of whole groups over folds.
std::vector<int> grouped_fold_assignment(const std::vector<int>& groups, int folds);

uint64_t data_fingerprint(const Matrix& X, const std::vector<double>& y);

}  // namespace pcqa

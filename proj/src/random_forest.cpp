#include "pcqa/random_forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pcqa/errors.hpp"
#include "pcqa/evaluation.hpp"
#include "pcqa/hash.hpp"
#include "pcqa/parallel.hpp"
#include "pcqa/rng.hpp"

namespace pcqa {

namespace {

constexpr double kPureSse = 1e-12;

struct NodeStats {
  double sum = 0.0;
  double sum2 = 0.0;
  double sse(std::size_t n) const { return sum2 - sum * sum / static_cast<double>(n); }
};

NodeStats stats_of(const std::vector<double>& y, const std::vector<int>& idx, int begin,
                   int end) {
  NodeStats s;
  for (int i = begin; i < end; ++i) {
    s.sum += y[idx[i]];
    s.sum2 += y[idx[i]] * y[idx[i]];
  }
  return s;
}

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& X, const std::vector<double>& y, const std::vector<int>& active,
              const ForestParams& p, int m_try, Rng rng, std::vector<double>& importance)
      : x_(X), y_(y), active_(active), p_(p), m_try_(m_try), rng_(rng), importance_(importance) {}

  RegressionTree build(std::vector<int> samples) {
    idx_ = std::move(samples);
    tree_.nodes.clear();
    grow(0, static_cast<int>(idx_.size()), 0);
    return std::move(tree_);
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double proxy = -std::numeric_limits<double>::infinity();
  };

  int grow(int begin, int end, int depth) {
    const int n = end - begin;
    const NodeStats stats = stats_of(y_, idx_, begin, end);
    const double node_sse = std::max(0.0, stats.sse(n));
    const double mean = stats.sum / n;

    const bool depth_stop = p_.max_depth >= 0 && depth >= p_.max_depth;
    if (n < 2 * p_.min_leaf || depth_stop || node_sse <= kPureSse) {
      return emit_leaf(mean);
    }

    const Split split = best_split(begin, end);
    if (split.feature < 0) return emit_leaf(mean);

    const int node_id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.push_back({split.feature, split.threshold, -1, -1, mean});

    auto mid_it = std::stable_partition(
        idx_.begin() + begin, idx_.begin() + end,
        [&](int i) { return x_[i][split.feature] <= split.threshold; });
    const int mid = static_cast<int>(mid_it - idx_.begin());

    const NodeStats ls = stats_of(y_, idx_, begin, mid);
    const NodeStats rs = stats_of(y_, idx_, mid, end);
    importance_[split.feature] +=
        node_sse - std::max(0.0, ls.sse(mid - begin)) - std::max(0.0, rs.sse(end - mid));

    const int left = grow(begin, mid, depth + 1);
    const int right = grow(mid, end, depth + 1);
    tree_.nodes[node_id].left = left;
    tree_.nodes[node_id].right = right;
    return node_id;
  }

  int emit_leaf(double mean) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.push_back({-1, 0.0, -1, -1, mean});
    return id;
  }

  Split best_split(int begin, int end) {
    const int n = end - begin;
    candidates_.assign(active_.begin(), active_.end());
    if (m_try_ < static_cast<int>(candidates_.size())) {
      for (int j = 0; j < m_try_; ++j) {
        const auto pick = j + rng_.uniform_index(candidates_.size() - j);
        std::swap(candidates_[j], candidates_[pick]);
      }
      candidates_.resize(m_try_);
      std::sort(candidates_.begin(), candidates_.end());
    }

    Split best;
    for (int f : candidates_) {
      sorted_.resize(n);
      for (int i = 0; i < n; ++i) {
        sorted_[i] = {x_[idx_[begin + i]][f], y_[idx_[begin + i]]};
      }
      std::sort(sorted_.begin(), sorted_.end());
      if (sorted_.front().first == sorted_.back().first) continue;

      double left_sum = 0.0;
      double total = 0.0;
      for (const auto& sy : sorted_) total += sy.second;
      for (int i = 0; i + 1 < n; ++i) {
        left_sum += sorted_[i].second;
        const int nl = i + 1, nr = n - nl;
        if (sorted_[i].first == sorted_[i + 1].first) continue;
        if (nl < p_.min_leaf || nr < p_.min_leaf) continue;
        const double right_sum = total - left_sum;
        const double proxy = left_sum * left_sum / nl + right_sum * right_sum / nr;
        if (proxy > best.proxy) {
          double thr = 0.5 * (sorted_[i].first + sorted_[i + 1].first);
          if (thr >= sorted_[i + 1].first) thr = sorted_[i].first;
          best = {f, thr, proxy};
        }
      }
    }
    return best;
  }

  const Matrix& x_;
  const std::vector<double>& y_;
  const std::vector<int>& active_;
  const ForestParams& p_;
  int m_try_;
  Rng rng_;
  std::vector<double>& importance_;
  RegressionTree tree_;
  std::vector<int> idx_;
  std::vector<int> candidates_;
  std::vector<std::pair<double, double>> sorted_;
};

void validate_training_data(const Matrix& X, const std::vector<double>& y) {
  if (X.empty()) throw BadArgument("training data is empty");
  if (X.size() != y.size()) throw BadArgument("feature rows and targets differ in length");
  const std::size_t d = X.front().size();
  if (d == 0) throw BadArgument("training rows have no columns");
  for (const auto& row : X) {
    if (row.size() != d) throw BadArgument("ragged feature matrix");
    for (double v : row) {
      if (!std::isfinite(v)) throw BadArgument("non-finite feature value");
    }
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw BadArgument("non-finite target value");
  }
}

}  // namespace

uint64_t data_fingerprint(const Matrix& X, const std::vector<double>& y) {
  uint64_t h = kFnvInit;
  h = fnv1a64(static_cast<uint64_t>(X.size()), h);
  h = fnv1a64(static_cast<uint64_t>(X.empty() ? 0 : X.front().size()), h);
  for (const auto& row : X) {
    for (double v : row) h = fnv1a64(v, h);
  }
  for (double v : y) h = fnv1a64(v, h);
  return h;
}

QualityModel train_forest(const Matrix& X, const std::vector<double>& y, const ForestParams& p,
                          const std::vector<bool>& mask) {
  validate_training_data(X, y);
  if (p.n_trees < 1) throw BadArgument("n_trees must be >= 1");
  if (p.min_leaf < 1) throw BadArgument("min_leaf must be >= 1");
  if (!(p.features_per_split > 0.0 && p.features_per_split <= 1.0)) {
    throw BadArgument("features_per_split must be in (0, 1]");
  }

  const std::size_t n = X.size();
  const std::size_t d = X.front().size();
  std::vector<bool> active_mask = mask.empty() ? std::vector<bool>(d, true) : mask;
  if (active_mask.size() != d) throw BadArgument("mask width does not match column count");
  std::vector<int> active;
  for (std::size_t j = 0; j < d; ++j) {
    if (active_mask[j]) active.push_back(static_cast<int>(j));
  }
  if (active.empty()) throw BadArgument("mask disables every feature");

  const int m_try = std::clamp<int>(
      static_cast<int>(std::lround(p.features_per_split * static_cast<double>(active.size()))), 1,
      static_cast<int>(active.size()));

  QualityModel model;
  model.params = p;
  model.selected_mask = active_mask;
  model.trees.resize(p.n_trees);
  model.importances.assign(d, 0.0);
  model.training_fingerprint = data_fingerprint(X, y);

  const Rng base(p.seed);
  std::vector<std::vector<double>> tree_importance(p.n_trees, std::vector<double>(d, 0.0));
  for (int t = 0; t < p.n_trees; ++t) {
    Rng rng = base.fork(static_cast<uint64_t>(t));
    std::vector<int> samples(n);
    if (p.bootstrap) {
      for (std::size_t i = 0; i < n; ++i) {
        samples[i] = static_cast<int>(rng.uniform_index(n));
      }
    } else {
      std::iota(samples.begin(), samples.end(), 0);
    }
    TreeBuilder builder(X, y, active, p, m_try, rng, tree_importance[t]);
    model.trees[t] = builder.build(std::move(samples));
  }

  for (int t = 0; t < p.n_trees; ++t) {
    double total = 0.0;
    for (double v : tree_importance[t]) total += v;
    if (total <= 0.0) continue;
    for (std::size_t j = 0; j < d; ++j) model.importances[j] += tree_importance[t][j] / total;
  }
  double total = 0.0;
  for (double v : model.importances) total += v;
  if (total > 0.0) {
    for (double& v : model.importances) v /= total;
  }
  return model;
}

double predict(const QualityModel& m, const double* x, std::size_t width) {
  if (width != m.importances.size()) {
    throw LayoutMismatch("feature width " + std::to_string(width) + " does not match model (" +
                         std::to_string(m.importances.size()) + ")");
  }
  if (m.trees.empty()) throw ModelError("model has no trees");
  double sum = 0.0;
  for (const auto& tree : m.trees) sum += tree.predict(x);
  return sum / static_cast<double>(m.trees.size());
}

double predict(const QualityModel& m, const std::vector<double>& x) {
  return predict(m, x.data(), x.size());
}

std::vector<double> predict_many(const QualityModel& m, const Matrix& X) {
  std::vector<double> out(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) out[i] = predict(m, X[i]);
  return out;
}

std::vector<int> grouped_fold_assignment(const std::vector<int>& groups, int folds) {
  const std::size_t n = groups.size();
  std::vector<int> distinct;
  std::vector<int> counts;
  std::vector<int> group_slot(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = std::find(distinct.begin(), distinct.end(), groups[i]);
    if (it == distinct.end()) {
      distinct.push_back(groups[i]);
      counts.push_back(1);
    } else {
      ++counts[it - distinct.begin()];
    }
  }
  const int g = static_cast<int>(distinct.size());
  folds = std::max(2, std::min(folds, g));

  std::vector<int> order(g);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return counts[a] > counts[b]; });

  std::vector<int> fold_of_group(g, 0);
  std::vector<int> fold_load(folds, 0);
  for (int oi : order) {
    int target = 0;
    for (int f = 1; f < folds; ++f) {
      if (fold_load[f] < fold_load[target]) target = f;
    }
    fold_of_group[oi] = target;
    fold_load[target] += counts[oi];
  }

  std::vector<int> fold_of_row(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto it = std::find(distinct.begin(), distinct.end(), groups[i]);
    fold_of_row[i] = fold_of_group[it - distinct.begin()];
  }
  return fold_of_row;
}

namespace {

double cv_pooled_srocc(const Matrix& X, const std::vector<double>& y,
                       const std::vector<int>& fold_of, int folds,
                       const std::vector<bool>& mask, const ForestParams& p) {
  const std::size_t n = X.size();
  std::vector<double> oof(n, 0.0);
  for (int f = 0; f < folds; ++f) {
    Matrix xt;
    std::vector<double> yt;
    std::vector<std::size_t> test_rows;
    for (std::size_t i = 0; i < n; ++i) {
      if (fold_of[i] == f) {
        test_rows.push_back(i);
      } else {
        xt.push_back(X[i]);
        yt.push_back(y[i]);
      }
    }
    if (test_rows.empty() || xt.empty()) continue;
    const QualityModel model = train_forest(xt, yt, p, mask);
    for (std::size_t i : test_rows) oof[i] = predict(model, X[i]);
  }
  try {
    return srocc(oof, y);
  } catch (const ConstantInput&) {
    return 0.0;
  }
}

}  // namespace

QualityModel rfe_select(const Matrix& X, const std::vector<double>& y,
                        const std::vector<int>& groups, const ForestParams& p, int folds,
                        RfeTrace* trace) {
  validate_training_data(X, y);
  const std::size_t d = X.front().size();

  std::vector<int> effective_groups = groups;
  if (effective_groups.empty()) {
    effective_groups.resize(X.size());
    std::iota(effective_groups.begin(), effective_groups.end(), 0);
  }
  if (effective_groups.size() != X.size()) {
    throw BadArgument("group labels do not match row count");
  }
  const std::vector<int> fold_of = grouped_fold_assignment(effective_groups, folds);
  const int n_folds = *std::max_element(fold_of.begin(), fold_of.end()) + 1;

  std::vector<bool> mask(d, true);
  std::vector<bool> best_mask = mask;
  double best_score = -std::numeric_limits<double>::infinity();

  int active_count = static_cast<int>(d);
  while (true) {
    const double score = cv_pooled_srocc(X, y, fold_of, n_folds, mask, p);
    if (trace) {
      trace->subset_sizes.push_back(active_count);
      trace->cv_scores.push_back(score);
    }
    if (score >= best_score) {
      best_score = score;
      best_mask = mask;
    }
    if (active_count == 1) break;

    const QualityModel ranking = train_forest(X, y, p, mask);
    int drop = -1;
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < d; ++j) {
      if (mask[j] && ranking.importances[j] < lowest) {
        lowest = ranking.importances[j];
        drop = static_cast<int>(j);
      }
    }
    mask[drop] = false;
    --active_count;
    if (trace) trace->eliminated.push_back(drop);
  }

  QualityModel final_model = train_forest(X, y, p, best_mask);
  return final_model;
}

}  // namespace pcqa

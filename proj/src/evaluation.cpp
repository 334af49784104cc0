#include "pcqa/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "pcqa/errors.hpp"
#include "pcqa/csv.hpp"
#include "pcqa/ply_io.hpp"
#include "pcqa/rng.hpp"

namespace pcqa {

namespace {

void check_pair_lengths(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw BadArgument("score vectors differ in length");
  if (x.size() < 3) throw BadArgument("correlation needs at least 3 samples");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

double plcc(std::span<const double> x, std::span<const double> y) {
  check_pair_lengths(x, y);
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) throw ConstantInput("zero variance input to plcc");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && a < b);
  });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;  // mean of 1-based ranks
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = shared;
    i = j + 1;
  }
  return ranks;
}

double srocc(std::span<const double> x, std::span<const double> y) {
  check_pair_lengths(x, y);
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  return plcc(rx, ry);
}

KrasulaResult krasula_analysis(std::span<const double> pred, std::span<const double> mos,
                               std::span<const double> ci, double delta_mos) {
  if (pred.size() != mos.size()) throw BadArgument("pred and mos differ in length");
  if (pred.size() < 2) throw BadArgument("pairwise analysis needs at least 2 stimuli");
  const bool use_ci = !ci.empty();
  if (use_ci && ci.size() != mos.size()) throw BadArgument("ci length mismatch");

  double threshold = delta_mos;
  if (!use_ci && threshold <= 0.0) {
    const auto [lo, hi] = std::minmax_element(mos.begin(), mos.end());
    threshold = 0.1 * (*hi - *lo);
  }

  struct PairSample {
    double score;     // |pred_i - pred_j|
    bool different;   // ground truth
    bool correct;     // better/worse agreement (different pairs only)
  };
  std::vector<PairSample> pairs;
  const std::size_t n = pred.size();
  pairs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double gap = std::fabs(mos[i] - mos[j]);
      bool different;
      if (use_ci) {
        different = gap > 1.96 * std::sqrt(ci[i] * ci[i] + ci[j] * ci[j]);
      } else {
        different = gap > threshold;
      }
      const double ds = pred[i] - pred[j];
      const double dm = mos[i] - mos[j];
      const bool correct = different && ((ds > 0.0 && dm > 0.0) || (ds < 0.0 && dm < 0.0));
      pairs.push_back({std::fabs(ds), different, correct});
    }
  }

  KrasulaResult out;
  for (const auto& p : pairs) {
    if (p.different) {
      ++out.n_different;
    } else {
      ++out.n_similar;
    }
  }
  if (out.n_different == 0) throw NoDifferentPairs("no pair clears the MOS difference test");

  std::size_t n_correct = 0;
  for (const auto& p : pairs) n_correct += p.correct ? 1 : 0;
  out.cc_better_worse = static_cast<double>(n_correct) / static_cast<double>(out.n_different);

  if (out.n_similar == 0) {
    out.auc_diff_sim = 1.0;
    return out;
  }

  // Mann-Whitney AUC with average ranks on tied |pred| gaps.
  std::vector<double> scores(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) scores[i] = pairs[i].score;
  const std::vector<double> ranks = average_ranks(scores);
  double rank_sum_diff = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].different) rank_sum_diff += ranks[i];
  }
  const double n_d = static_cast<double>(out.n_different);
  const double n_s = static_cast<double>(out.n_similar);
  const double u = rank_sum_diff - n_d * (n_d + 1.0) / 2.0;
  out.auc_diff_sim = u / (n_d * n_s);
  return out;
}

int SubjectiveDataset::content_index(const std::string& ref_id) const {
  for (std::size_t i = 0; i < contents.size(); ++i) {
    if (contents[i] == ref_id) return static_cast<int>(i);
  }
  return -1;
}

bool SubjectiveDataset::all_have_ci() const {
  for (const auto& e : entries) {
    if (!e.has_ci) return false;
  }
  return !entries.empty();
}

SubjectiveDataset load_manifest(const std::string& path) {
  const auto rows = read_csv(path);
  SubjectiveDataset ds;
  std::vector<std::string> seen_dist;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& f = rows[r];
    if (r == 0 && !f.empty() && f[0] == "ref_id") continue;  // header
    if (f.size() != 5 && f.size() != 6) {
      throw BadArgument("manifest row " + std::to_string(r + 1) + " has " +
                        std::to_string(f.size()) + " fields (want 5 or 6)");
    }
    DatasetEntry e;
    e.ref_id = f[0];
    e.dist_id = f[1];
    e.ref_path = f[2];
    e.dist_path = f[3];
    try {
      e.mos = std::stod(f[4]);
      if (f.size() == 6 && !f[5].empty()) {
        e.ci = std::stod(f[5]);
        e.has_ci = true;
      }
    } catch (const std::exception&) {
      throw BadArgument("manifest row " + std::to_string(r + 1) + ": bad number");
    }
    if (!std::isfinite(e.mos)) {
      throw BadArgument("manifest row " + std::to_string(r + 1) + ": mos not finite");
    }
    for (const auto& prev : ds.entries) {
      if (prev.dist_id == e.dist_id && prev.ref_id != e.ref_id) {
        throw BadArgument("dist_id '" + e.dist_id + "' appears under two ref_ids");
      }
    }
    if (ds.content_index(e.ref_id) < 0) ds.contents.push_back(e.ref_id);
    ds.entries.push_back(std::move(e));
  }
  if (ds.entries.empty()) throw BadArgument("manifest " + path + " has no entries");
  return ds;
}

SplitPlan generate_splits(int n_contents, double test_fraction) {
  if (n_contents < 2) throw BadArgument("need at least 2 contents to split");
  int t = static_cast<int>(std::lround(test_fraction * n_contents));
  t = std::clamp(t, 1, n_contents - 1);

  SplitPlan plan;
  std::vector<int> comb(t);
  std::iota(comb.begin(), comb.end(), 0);
  while (true) {
    std::vector<int> test = comb;
    std::vector<int> train;
    train.reserve(n_contents - t);
    for (int c = 0; c < n_contents; ++c) {
      if (!std::binary_search(test.begin(), test.end(), c)) train.push_back(c);
    }
    plan.splits.emplace_back(std::move(train), std::move(test));
    // next lexicographic combination
    int i = t - 1;
    while (i >= 0 && comb[i] == n_contents - t + i) --i;
    if (i < 0) break;
    ++comb[i];
    for (int j = i + 1; j < t; ++j) comb[j] = comb[j - 1] + 1;
  }
  return plan;
}

void dataset_features(const SubjectiveDataset& ds, const BenchOptions& opt, Matrix& X,
                      std::vector<double>& y, std::vector<int>& groups, StageTimings* stage_sum,
                      std::vector<double>* ci) {
  X.clear();
  y.clear();
  groups.clear();
  if (ci) ci->clear();

  auto resolve = [&](const std::string& p) -> std::string {
    std::filesystem::path fp(p);
    if (fp.is_absolute() || opt.base_dir.empty()) return p;
    return (std::filesystem::path(opt.base_dir) / fp).string();
  };

  // Clouds are reloaded per entry except the reference, which manifests
  // typically repeat in runs; a one-slot memo covers that.
  std::string memo_path;
  PointCloud memo_cloud;
  uint64_t memo_hash = 0;

  for (const auto& e : ds.entries) {
    const std::string ref_path = resolve(e.ref_path);
    const std::string dist_path = resolve(e.dist_path);

    if (memo_path != ref_path) {
      memo_cloud = load_ply(ref_path);
      memo_hash = cloud_hash(memo_cloud);
      memo_path = ref_path;
    }

    FeatureVector fv;
    bool hit = false;
    std::string cache_name;
    PointCloud dist_cloud = load_ply(dist_path);
    const uint64_t dist_hash = cloud_hash(dist_cloud);
    if (!opt.cache_dir.empty()) {
      cache_name = feature_cache_name(memo_hash, dist_hash, opt.k);
      hit = load_cached_features(opt.cache_dir, cache_name, fv);
    }
    if (!hit) {
      StageTimings t;
      fv = extract_features(memo_cloud, dist_cloud, opt.k, opt.threads, nullptr, &t);
      if (stage_sum) {
        stage_sum->preprocess_s += t.preprocess_s;
        stage_sum->pairing_s += t.pairing_s;
        stage_sum->descriptors_s += t.descriptors_s;
        stage_sum->pooling_s += t.pooling_s;
        stage_sum->total_s += t.total_s;
      }
      if (!opt.cache_dir.empty()) store_cached_features(opt.cache_dir, cache_name, fv);
    }

    X.emplace_back(fv.f.begin(), fv.f.end());
    y.push_back(e.mos);
    groups.push_back(ds.content_index(e.ref_id));
    if (ci) ci->push_back(e.has_ci ? e.ci : 0.0);
  }
}

BenchReport benchmark_features(const Matrix& X, const std::vector<double>& y,
                               const std::vector<int>& groups, const BenchOptions& opt,
                               const std::vector<double>& ci) {
  const int n_contents = 1 + *std::max_element(groups.begin(), groups.end());
  SplitPlan plan = generate_splits(n_contents, opt.test_fraction);

  BenchReport report;
  report.n_splits_total = static_cast<int>(plan.splits.size());

  std::vector<int> chosen(plan.splits.size());
  std::iota(chosen.begin(), chosen.end(), 0);
  if (opt.split_cap > 0 && opt.split_cap < static_cast<int>(plan.splits.size())) {
    Rng rng(opt.seed);
    for (int j = 0; j < opt.split_cap; ++j) {
      const auto pick = j + rng.uniform_index(chosen.size() - j);
      std::swap(chosen[j], chosen[pick]);
    }
    chosen.resize(opt.split_cap);
    std::sort(chosen.begin(), chosen.end());
  }
  report.n_splits_run = static_cast<int>(chosen.size());

  std::vector<double> pooled_pred, pooled_mos, pooled_ci;
  const auto t_train0 = std::chrono::steady_clock::now();
  for (int si : chosen) {
    const auto& [train_contents, test_contents] = plan.splits[si];
    Matrix xt;
    std::vector<double> yt;
    std::vector<int> gt;
    std::vector<std::size_t> test_rows;
    for (std::size_t i = 0; i < X.size(); ++i) {
      if (std::binary_search(test_contents.begin(), test_contents.end(), groups[i])) {
        test_rows.push_back(i);
      } else {
        xt.push_back(X[i]);
        yt.push_back(y[i]);
        gt.push_back(groups[i]);
      }
    }
    if (xt.empty() || test_rows.size() < 3) continue;

    QualityModel model = opt.rfe ? rfe_select(xt, yt, gt, opt.forest, opt.folds)
                                 : train_forest(xt, yt, opt.forest);

    std::vector<double> pred(test_rows.size()), truth(test_rows.size());
    for (std::size_t r = 0; r < test_rows.size(); ++r) {
      pred[r] = predict(model, X[test_rows[r]]);
      truth[r] = y[test_rows[r]];
      pooled_pred.push_back(pred[r]);
      pooled_mos.push_back(truth[r]);
      if (!ci.empty()) pooled_ci.push_back(ci[test_rows[r]]);
    }

    SplitResult sr;
    sr.split_index = si;
    sr.n_test = static_cast<int>(test_rows.size());
    try {
      sr.srocc = srocc(pred, truth);
      sr.plcc = plcc(pred, truth);
    } catch (const ConstantInput&) {
      sr.srocc = 0.0;
      sr.plcc = 0.0;
    }
    report.per_split.push_back(sr);
  }
  report.train_s = seconds_since(t_train0);

  if (report.per_split.empty()) throw BadArgument("no evaluable split (test sets too small)");

  auto mean_std = [](auto getter, const std::vector<SplitResult>& rs, double& mean, double& sd) {
    double m = 0.0;
    for (const auto& r : rs) m += getter(r);
    m /= static_cast<double>(rs.size());
    double v = 0.0;
    for (const auto& r : rs) v += (getter(r) - m) * (getter(r) - m);
    sd = rs.size() > 1 ? std::sqrt(v / static_cast<double>(rs.size() - 1)) : 0.0;
    mean = m;
  };
  mean_std([](const SplitResult& r) { return r.srocc; }, report.per_split, report.srocc_mean,
           report.srocc_std);
  mean_std([](const SplitResult& r) { return r.plcc; }, report.per_split, report.plcc_mean,
           report.plcc_std);

  const auto t_eval0 = std::chrono::steady_clock::now();
  try {
    const bool use_ci = !pooled_ci.empty() &&
                        std::all_of(pooled_ci.begin(), pooled_ci.end(),
                                    [](double v) { return v > 0.0; });
    const KrasulaResult kr = krasula_analysis(
        pooled_pred, pooled_mos,
        use_ci ? std::span<const double>(pooled_ci) : std::span<const double>{}, opt.delta_mos);
    report.auc_diff_sim = kr.auc_diff_sim;
    report.cc_better_worse = kr.cc_better_worse;
  } catch (const NoDifferentPairs&) {
    report.auc_diff_sim = 0.0;
    report.cc_better_worse = 0.0;
    report.notes += "pairwise analysis skipped: no different pairs; ";
  }
  report.eval_s = seconds_since(t_eval0);
  return report;
}

BenchReport benchmark(const SubjectiveDataset& ds, const BenchOptions& opt) {
  Matrix X;
  std::vector<double> y;
  std::vector<int> groups;
  std::vector<double> ci;
  StageTimings stage;
  const auto t0 = std::chrono::steady_clock::now();
  dataset_features(ds, opt, X, y, groups, &stage, &ci);
  const double extract_s = seconds_since(t0);

  const bool any_ci = ds.all_have_ci();
  BenchReport report = benchmark_features(X, y, groups, opt,
                                          any_ci ? ci : std::vector<double>{});
  report.extract_s = extract_s;
  report.stage = stage;
  return report;
}

}  // namespace pcqa

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pcqa/csv.hpp"
#include "pcqa/errors.hpp"
#include "pcqa/evaluation.hpp"
#include "pcqa/features.hpp"
#include "pcqa/hash.hpp"
#include "pcqa/model_io.hpp"
#include "pcqa/neighborhood.hpp"
#include "pcqa/ply_io.hpp"
#include "pcqa/random_forest.hpp"
#include "pcqa/rng.hpp"
#include "pcqa/synth.hpp"

namespace {

namespace fs = std::filesystem;
using namespace pcqa;

std::string config_echo(int k, uint64_t seed, const std::string& color_space) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "# config k=%d eps=%g seed=%llu color_space=%s layout_version=%d",
                k, kDistanceEps, static_cast<unsigned long long>(seed), color_space.c_str(),
                kLayoutVersion);
  return buf;
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

PointCloud load_cloud(const std::string& path, const std::string& color_space) {
  PointCloud pc = load_ply(path);
  if (color_space == "ycbcr") return assume_ycbcr(pc);
  return pc;
}

void write_predictor_dump(const std::string& path, const PredictorMatrix& pm,
                          const std::string& echo) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << echo << "\n";
  out << "point_index";
  for (const auto& name : feature_names()) out << ',' << name;
  out << "\n";
  char buf[32];
  for (std::size_t i = 0; i < pm.rows.size(); ++i) {
    out << i;
    for (double v : pm.rows[i]) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << ',' << buf;
    }
    out << "\n";
  }
}

void write_neighbor_dump(const std::string& path, const PointCloud& a, const PointCloud& b,
                         int k) {
  NeighborhoodPairer pairer(a, b, k);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out.write("PCQANBR1", 8);
  const int32_t kr = pairer.k_ref(), kd = pairer.k_dist();
  const uint64_t n = a.size();
  out.write(reinterpret_cast<const char*>(&kr), 4);
  out.write(reinterpret_cast<const char*>(&kd), 4);
  out.write(reinterpret_cast<const char*>(&n), 8);
  NeighborhoodPair pair;
  std::vector<Neighbor> scratch;
  for (uint64_t i = 0; i < n; ++i) {
    pairer.pair_at(static_cast<int32_t>(i), pair, scratch);
    out.write(reinterpret_cast<const char*>(pair.ref.data()), 4 * pair.ref.size());
    out.write(reinterpret_cast<const char*>(pair.dist.data()), 4 * pair.dist.size());
  }
}

struct MosTable {
  std::vector<std::pair<std::string, double>> rows;

  double lookup(const std::string& dist_id) const {
    for (const auto& [id, mos] : rows) {
      if (id == dist_id) return mos;
    }
    throw BadArgument("no MOS entry for dist_id '" + dist_id + "'");
  }
};

MosTable load_mos(const std::string& path) {
  MosTable table;
  for (const auto& f : read_csv(path)) {
    std::string id;
    std::string value;
    if (f.size() == 2) {
      id = f[0];
      value = f[1];
    } else if (f.size() == 5 || f.size() == 6) {
      id = f[1];
      value = f[4];
    } else {
      throw BadArgument("mos file rows must have 2 fields (dist_id,mos) or be a manifest");
    }
    if (!table.rows.empty() || id != "dist_id") {
      try {
        table.rows.emplace_back(id, std::stod(value));
      } catch (const std::exception&) {
        if (table.rows.empty()) continue;  // header row
        throw BadArgument("bad mos value '" + value + "' for '" + id + "'");
      }
    }
  }
  if (table.rows.empty()) throw BadArgument("mos file " + path + " has no entries");
  return table;
}

int cmd_extract(const std::string& ref_path, const std::string& dist_path, int k,
                const std::string& color_space, int threads, uint64_t seed,
                const std::string& out_path, const std::string& cache_dir,
                const std::string& dump_predictors, const std::string& dump_neighbors,
                const std::string& ids) {
  const PointCloud ref = load_cloud(ref_path, color_space);
  const PointCloud dist = load_cloud(dist_path, color_space);

  FeatureVector fv;
  fv.ref_id = stem_of(ref_path);
  fv.dist_id = stem_of(dist_path);
  if (!ids.empty()) {
    const auto comma = ids.find(',');
    if (comma == std::string::npos) throw BadArgument("--ids wants 'ref_id,dist_id'");
    fv.ref_id = ids.substr(0, comma);
    fv.dist_id = ids.substr(comma + 1);
  }

  const std::string echo = config_echo(k, seed, color_space);

  std::string cache_name;
  bool hit = false;
  if (!cache_dir.empty()) {
    cache_name = feature_cache_name(cloud_hash(ref), cloud_hash(dist), k);
    FeatureVector cached;
    if (load_cached_features(cache_dir, cache_name, cached)) {
      cached.ref_id = fv.ref_id;
      cached.dist_id = fv.dist_id;
      fv = cached;
      hit = true;
    }
  }

  if (!hit || !dump_predictors.empty() || !dump_neighbors.empty()) {
    PredictorMatrix pm;
    StageTimings timings;
    const std::string ref_id = fv.ref_id, dist_id = fv.dist_id;
    FeatureVector fresh =
        extract_features(ref, dist, k, threads, dump_predictors.empty() ? nullptr : &pm, &timings);
    fresh.ref_id = ref_id;
    fresh.dist_id = dist_id;
    fv = fresh;
    if (!cache_dir.empty()) store_cached_features(cache_dir, cache_name, fv);
    if (!dump_predictors.empty()) write_predictor_dump(dump_predictors, pm, echo);
    if (!dump_neighbors.empty()) {
      PointCloud a = merge_duplicates(ref);
      PointCloud b = merge_duplicates(dist);
      write_neighbor_dump(dump_neighbors, a, b, k);
    }
    std::fprintf(stderr, "timings: preprocess %.3fs pairing %.3fs descriptors %.3fs pooling %.3fs total %.3fs\n",
                 timings.preprocess_s, timings.pairing_s, timings.descriptors_s,
                 timings.pooling_s, timings.total_s);
  }

  if (out_path.empty()) {
    std::cout << echo << "\n" << feature_csv_header() << "\n" << feature_csv_row(fv) << "\n";
  } else {
    const bool fresh_file = !fs::exists(out_path) || fs::file_size(out_path) == 0;
    std::ofstream out(out_path, std::ios::app);
    if (!out) throw InputError("cannot write '" + out_path + "'");
    if (fresh_file) out << echo << "\n" << feature_csv_header() << "\n";
    out << feature_csv_row(fv) << "\n";
  }
  return 0;
}

ForestParams forest_from_flags(int trees, int max_depth, int min_leaf, double fps,
                               bool no_bootstrap, uint64_t seed) {
  ForestParams p;
  p.n_trees = trees;
  p.max_depth = max_depth;
  p.min_leaf = min_leaf;
  p.features_per_split = fps;
  p.bootstrap = !no_bootstrap;
  p.seed = seed;
  return p;
}

int cmd_train(const std::string& features_path, const std::string& mos_path,
              const std::string& out_path, const ForestParams& params, int folds, bool no_rfe) {
  const auto rows = read_feature_csv(features_path);
  const MosTable mos = load_mos(mos_path);

  Matrix X;
  std::vector<double> y;
  std::vector<int> groups;
  std::vector<std::string> contents;
  for (const auto& fv : rows) {
    X.emplace_back(fv.f.begin(), fv.f.end());
    y.push_back(mos.lookup(fv.dist_id));
    auto it = std::find(contents.begin(), contents.end(), fv.ref_id);
    if (it == contents.end()) {
      contents.push_back(fv.ref_id);
      it = contents.end() - 1;
    }
    groups.push_back(static_cast<int>(it - contents.begin()));
  }

  double y_min = y.front(), y_max = y.front();
  for (double v : y) {
    y_min = std::min(y_min, v);
    y_max = std::max(y_max, v);
  }
  if (y_min == y_max) {
    std::fprintf(stderr, "warning: all MOS values equal %.6g; model will predict a constant\n",
                 y_min);
  }

  QualityModel model;
  RfeTrace trace;
  if (no_rfe || X.front().size() == 1) {
    model = train_forest(X, y, params);
  } else {
    model = rfe_select(X, y, groups, params, folds, &trace);
  }
  save_model(model, out_path);

  int selected = 0;
  for (bool b : model.selected_mask) selected += b ? 1 : 0;
  std::cout << "trained on " << X.size() << " pairs, " << contents.size() << " contents\n";
  std::cout << "selected " << selected << "/" << model.selected_mask.size() << " features\n";
  if (!trace.cv_scores.empty()) {
    double best = trace.cv_scores.front();
    for (double s : trace.cv_scores) best = std::max(best, s);
    std::cout << "best cv srocc " << best << "\n";
  }
  std::cout << "model written to " << out_path << "\n";
  return 0;
}

void print_score(double score) { std::printf("%.6f\n", score); }

int cmd_predict(const std::string& model_path, const std::string& ref_path,
                const std::string& dist_path, const std::string& manifest_path,
                const std::string& features_path, int k, const std::string& color_space,
                int threads, const std::string& cache_dir) {
  const QualityModel model = load_model(model_path);

  if (!features_path.empty()) {
    for (const auto& fv : read_feature_csv(features_path)) {
      print_score(predict(model, fv.f.data(), fv.f.size()));
    }
    return 0;
  }

  if (!manifest_path.empty()) {
    const SubjectiveDataset ds = load_manifest(manifest_path);
    BenchOptions opt;
    opt.k = k;
    opt.threads = threads;
    opt.cache_dir = cache_dir;
    opt.base_dir = fs::path(manifest_path).parent_path().string();
    Matrix X;
    std::vector<double> y;
    std::vector<int> groups;
    dataset_features(ds, opt, X, y, groups, nullptr);
    for (const auto& row : X) print_score(predict(model, row));
    return 0;
  }

  if (ref_path.empty() || dist_path.empty()) {
    throw BadArgument("predict needs REF and DIST, or --manifest, or --features");
  }
  const PointCloud ref = load_cloud(ref_path, color_space);
  const PointCloud dist = load_cloud(dist_path, color_space);
  const FeatureVector fv = extract_features(ref, dist, k, threads);
  print_score(predict(model, fv.f.data(), fv.f.size()));
  return 0;
}

int cmd_evaluate(const std::string& scores_path, const std::string& model_path,
                 const std::string& manifest_path, double delta_mos, int k, int threads,
                 const std::string& cache_dir) {
  std::vector<double> pred, mos, ci;
  bool all_ci = true;

  if (!scores_path.empty()) {
    for (const auto& f : read_csv(scores_path)) {
      std::size_t base;
      if (f.size() == 2) {
        base = 0;
      } else if (f.size() == 3 || f.size() == 4) {
        base = 1;
      } else {
        throw BadArgument("scores rows: pred,mos | id,pred,mos | id,pred,mos,ci");
      }
      try {
        const double p = std::stod(f[base]);
        const double m = std::stod(f[base + 1]);
        pred.push_back(p);
        mos.push_back(m);
        if (f.size() == 4) {
          ci.push_back(std::stod(f[3]));
        } else {
          all_ci = false;
        }
      } catch (const std::exception&) {
        if (pred.empty()) continue;  // header row
        throw BadArgument("bad number in scores file row");
      }
    }
  } else {
    if (model_path.empty() || manifest_path.empty()) {
      throw BadArgument("evaluate needs --scores, or --model with --manifest");
    }
    const QualityModel model = load_model(model_path);
    const SubjectiveDataset ds = load_manifest(manifest_path);
    BenchOptions opt;
    opt.k = k;
    opt.threads = threads;
    opt.cache_dir = cache_dir;
    opt.base_dir = fs::path(manifest_path).parent_path().string();
    Matrix X;
    std::vector<int> groups;
    std::vector<double> entry_ci;
    dataset_features(ds, opt, X, mos, groups, nullptr, &entry_ci);
    for (const auto& row : X) pred.push_back(predict(model, row));
    all_ci = ds.all_have_ci();
    if (all_ci) ci = entry_ci;
  }

  if (pred.size() < 3) throw BadArgument("need at least 3 scored stimuli");

  const double p = plcc(pred, mos);
  const double s = srocc(pred, mos);
  std::printf("n %zu\n", pred.size());
  std::printf("plcc %.6f\n", p);
  std::printf("srocc %.6f\n", s);
  try {
    const KrasulaResult kr =
        krasula_analysis(pred, mos,
                         (all_ci && ci.size() == pred.size()) ? std::span<const double>(ci)
                                                              : std::span<const double>{},
                         delta_mos);
    std::printf("auc_diff_sim %.6f\n", kr.auc_diff_sim);
    std::printf("cc_better_worse %.6f\n", kr.cc_better_worse);
    std::printf("pairs_different %zu\n", kr.n_different);
    std::printf("pairs_similar %zu\n", kr.n_similar);
  } catch (const NoDifferentPairs&) {
    std::printf("auc_diff_sim nan (no different pairs)\n");
    std::printf("cc_better_worse nan (no different pairs)\n");
  }
  return 0;
}

int cmd_bench(const std::string& manifest_path, const std::string& out_dir, int k, int threads,
              uint64_t seed, const ForestParams& params, int folds, int split_cap,
              double test_fraction, double delta_mos, bool no_rfe,
              const std::string& cache_dir) {
  const SubjectiveDataset ds = load_manifest(manifest_path);
  BenchOptions opt;
  opt.k = k;
  opt.forest = params;
  opt.folds = folds;
  opt.split_cap = split_cap;
  opt.seed = seed;
  opt.threads = threads;
  opt.test_fraction = test_fraction;
  opt.delta_mos = delta_mos;
  opt.rfe = !no_rfe;
  opt.cache_dir = cache_dir;
  opt.base_dir = fs::path(manifest_path).parent_path().string();

  const BenchReport report = benchmark(ds, opt);
  const std::string echo = config_echo(k, seed, "rgb");

  char line[256];
  std::string summary;
  summary += echo + "\n";
  std::snprintf(line, sizeof(line), "contents %zu stimuli %zu\n", ds.contents.size(),
                ds.entries.size());
  summary += line;
  std::snprintf(line, sizeof(line), "splits %d of %d (test fraction %g)\n", report.n_splits_run,
                report.n_splits_total, test_fraction);
  summary += line;
  std::snprintf(line, sizeof(line), "srocc %.6f +/- %.6f\n", report.srocc_mean, report.srocc_std);
  summary += line;
  std::snprintf(line, sizeof(line), "plcc %.6f +/- %.6f\n", report.plcc_mean, report.plcc_std);
  summary += line;
  std::snprintf(line, sizeof(line), "auc_diff_sim %.6f\n", report.auc_diff_sim);
  summary += line;
  std::snprintf(line, sizeof(line), "cc_better_worse %.6f\n", report.cc_better_worse);
  summary += line;
  if (!report.notes.empty()) summary += "note " + report.notes + "\n";

  std::cout << summary;
  std::fprintf(stderr,
               "timings: extract %.3fs (pairing %.3fs descriptors %.3fs) train+eval %.3fs\n",
               report.extract_s, report.stage.pairing_s, report.stage.descriptors_s,
               report.train_s + report.eval_s);

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    {
      std::ofstream out(fs::path(out_dir) / "summary.txt");
      out << summary;
    }
    {
      std::ofstream out(fs::path(out_dir) / "splits.csv");
      out << echo << "\n";
      out << "split_index,n_test,srocc,plcc\n";
      for (const auto& r : report.per_split) {
        std::snprintf(line, sizeof(line), "%d,%d,%.17g,%.17g\n", r.split_index, r.n_test, r.srocc,
                      r.plcc);
        out << line;
      }
    }
    {
      std::ofstream out(fs::path(out_dir) / "timings.txt");
      std::snprintf(line, sizeof(line),
                    "extract_s %.3f\npreprocess_s %.3f\npairing_s %.3f\ndescriptors_s %.3f\n"
                    "pooling_s %.3f\ntrain_s %.3f\neval_s %.3f\n",
                    report.extract_s, report.stage.preprocess_s, report.stage.pairing_s,
                    report.stage.descriptors_s, report.stage.pooling_s, report.train_s,
                    report.eval_s);
      out << line;
    }
  }
  return 0;
}

int cmd_synth(const std::string& shape_name_, std::size_t n, uint64_t seed,
              const std::string& out_path, const std::string& distort, const std::string& format) {
  const Shape shape = parse_shape(shape_name_);
  PointCloud pc = make_reference(shape, n, seed);
  if (!distort.empty()) {
    uint64_t st = seed;
    (void)splitmix64(st);
    const DistortionSpec spec = parse_distortion(distort, splitmix64(st));
    pc = apply_distortion(pc, spec);
  }
  std::ostringstream cfg;
  cfg << "pcqa-synth shape=" << shape_name_ << " n=" << n << " seed=" << seed;
  if (!distort.empty()) cfg << " distort=" << distort;
  if (format == "binary") {
    save_ply_binary(pc, out_path, cfg.str());
  } else {
    save_ply_ascii(pc, out_path, cfg.str());
  }
  std::cout << "wrote " << pc.size() << " points to " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Full-reference point cloud quality metric toolkit"};
  app.require_subcommand(1);

  // extract
  auto* extract = app.add_subcommand("extract", "Extract the 44-feature vector for a cloud pair");
  std::string x_ref, x_dist, x_out, x_cache, x_dump_pred, x_dump_nbr, x_ids;
  std::string x_space = "rgb";
  int x_k = 81, x_threads = 1;
  uint64_t x_seed = 0;
  extract->add_option("ref", x_ref, "reference .ply")->required();
  extract->add_option("dist", x_dist, "distorted .ply")->required();
  extract->add_option("-k,--neighbors", x_k, "neighborhood size (default 81)");
  extract->add_option("--color-space", x_space, "input color space: rgb|ycbcr")
      ->check(CLI::IsMember({"rgb", "ycbcr"}));
  extract->add_option("--threads", x_threads, "worker threads");
  extract->add_option("--seed", x_seed, "run seed (echoed into artifacts)");
  extract->add_option("--out", x_out, "append feature row to this CSV");
  extract->add_option("--cache-dir", x_cache, "feature cache directory");
  extract->add_option("--dump-predictors", x_dump_pred, "write per-point predictor CSV");
  extract->add_option("--dump-neighbors", x_dump_nbr, "write binary neighbor dump");
  extract->add_option("--ids", x_ids, "override 'ref_id,dist_id' in the output row");

  // train
  auto* train = app.add_subcommand("train", "Train the forest (with RFE) on extracted features");
  std::string t_features, t_mos, t_out = "model.json";
  int t_trees = 100, t_depth = -1, t_min_leaf = 1, t_folds = 5;
  double t_fps = 1.0;
  bool t_no_bootstrap = false, t_no_rfe = false;
  uint64_t t_seed = 0;
  train->add_option("--features", t_features, "feature CSV from extract")->required();
  train->add_option("--mos", t_mos, "CSV dist_id,mos (or a manifest)")->required();
  train->add_option("--out", t_out, "output model path");
  train->add_option("--trees", t_trees, "number of trees");
  train->add_option("--max-depth", t_depth, "max tree depth (-1 unlimited)");
  train->add_option("--min-leaf", t_min_leaf, "min samples per leaf");
  train->add_option("--features-per-split", t_fps, "fraction of features tried per split");
  train->add_flag("--no-bootstrap", t_no_bootstrap, "disable bootstrap resampling");
  train->add_option("--seed", t_seed, "training seed");
  train->add_option("--folds", t_folds, "cross-validation folds for RFE");
  train->add_flag("--no-rfe", t_no_rfe, "skip feature elimination");

  // predict / score
  auto* pred = app.add_subcommand("predict", "Score cloud pairs with a trained model");
  pred->alias("score");
  std::string p_model, p_ref, p_dist, p_manifest, p_features, p_cache;
  std::string p_space = "rgb";
  int p_k = 81, p_threads = 1;
  pred->add_option("--model", p_model, "model file")->required();
  pred->add_option("ref", p_ref, "reference .ply");
  pred->add_option("dist", p_dist, "distorted .ply");
  pred->add_option("--manifest", p_manifest, "batch manifest CSV");
  pred->add_option("--features", p_features, "pre-extracted feature CSV");
  pred->add_option("-k,--neighbors", p_k, "neighborhood size");
  pred->add_option("--color-space", p_space, "rgb|ycbcr")
      ->check(CLI::IsMember({"rgb", "ycbcr"}));
  pred->add_option("--threads", p_threads, "worker threads");
  pred->add_option("--cache-dir", p_cache, "feature cache directory");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Correlation and pairwise analysis of scores");
  std::string e_scores, e_model, e_manifest, e_cache;
  double e_delta = 0.0;
  int e_k = 81, e_threads = 1;
  eval->add_option("--scores", e_scores, "CSV of pred,mos (optionally id,pred,mos[,ci])");
  eval->add_option("--model", e_model, "model file (with --manifest)");
  eval->add_option("--manifest", e_manifest, "manifest CSV (with --model)");
  eval->add_option("--delta-mos", e_delta, "MOS difference threshold (0 = 10% of range)");
  eval->add_option("-k,--neighbors", e_k, "neighborhood size");
  eval->add_option("--threads", e_threads, "worker threads");
  eval->add_option("--cache-dir", e_cache, "feature cache directory");

  // bench
  auto* bench = app.add_subcommand("bench", "Split-protocol benchmark over a manifest");
  std::string b_manifest, b_out_dir, b_cache;
  int b_k = 81, b_threads = 1, b_trees = 100, b_folds = 5, b_split_cap = 0;
  double b_test_fraction = 0.2, b_delta = 0.0;
  bool b_no_rfe = false;
  uint64_t b_seed = 0;
  bench->add_option("--manifest", b_manifest, "manifest CSV")->required();
  bench->add_option("--out-dir", b_out_dir, "directory for report files");
  bench->add_option("-k,--neighbors", b_k, "neighborhood size");
  bench->add_option("--threads", b_threads, "worker threads");
  bench->add_option("--seed", b_seed, "seed for split capping");
  bench->add_option("--trees", b_trees, "number of trees");
  bench->add_option("--folds", b_folds, "RFE cross-validation folds");
  bench->add_option("--split-cap", b_split_cap, "cap on evaluated splits (0 = all)");
  bench->add_option("--test-fraction", b_test_fraction, "held-out content fraction");
  bench->add_option("--delta-mos", b_delta, "MOS difference threshold (0 = 10% of range)");
  bench->add_flag("--no-rfe", b_no_rfe, "train without feature elimination");
  bench->add_option("--cache-dir", b_cache, "feature cache directory");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic cloud, optionally distorted");
  std::string s_shape = "sphere", s_out, s_distort, s_format = "ascii";
  std::size_t s_n = 10000;
  uint64_t s_seed = 0;
  synth->add_option("--shape", s_shape,
                    "plane|sphere|cube_volume|torus|colored_gradient_sphere");
  synth->add_option("--n", s_n, "point count");
  synth->add_option("--seed", s_seed, "generator seed");
  synth->add_option("--out", s_out, "output .ply path")->required();
  synth->add_option("--distort", s_distort, "distortion as kind:level");
  synth->add_option("--format", s_format, "ascii|binary")
      ->check(CLI::IsMember({"ascii", "binary"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (extract->parsed()) {
      return cmd_extract(x_ref, x_dist, x_k, x_space, x_threads, x_seed, x_out, x_cache,
                         x_dump_pred, x_dump_nbr, x_ids);
    }
    if (train->parsed()) {
      return cmd_train(t_features, t_mos, t_out,
                       forest_from_flags(t_trees, t_depth, t_min_leaf, t_fps, t_no_bootstrap,
                                         t_seed),
                       t_folds, t_no_rfe);
    }
    if (pred->parsed()) {
      return cmd_predict(p_model, p_ref, p_dist, p_manifest, p_features, p_k, p_space, p_threads,
                         p_cache);
    }
    if (eval->parsed()) {
      return cmd_evaluate(e_scores, e_model, e_manifest, e_delta, e_k, e_threads, e_cache);
    }
    if (bench->parsed()) {
      return cmd_bench(b_manifest, b_out_dir, b_k, b_threads, b_seed,
                       forest_from_flags(b_trees, -1, 1, 1.0, false, b_seed), b_folds,
                       b_split_cap, b_test_fraction, b_delta, b_no_rfe, b_cache);
    }
    if (synth->parsed()) {
      return cmd_synth(s_shape, s_n, s_seed, s_out, s_distort, s_format);
    }
  } catch (const InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return InputError::exit_code;
  } catch (const ModelError& e) {
    std::fprintf(stderr, "model error: %s\n", e.what());
    return ModelError::exit_code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return InternalError::exit_code;
  }
  return 0;
}

#include "pcqa/model_io.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "pcqa/errors.hpp"
#include "pcqa/hash.hpp"

namespace pcqa {

namespace {

constexpr int kModelFormatVersion = 1;

using json = nlohmann::json;

}  // namespace

void save_model(const QualityModel& m, const std::string& path) {
  json j;
  j["format"] = "pcqa-model";
  j["version"] = kModelFormatVersion;
  j["layout_version"] = m.layout_version;
  j["params"] = {
      {"n_trees", m.params.n_trees},
      {"max_depth", m.params.max_depth},
      {"min_leaf", m.params.min_leaf},
      {"features_per_split", m.params.features_per_split},
      {"bootstrap", m.params.bootstrap},
      {"seed", m.params.seed},
  };
  j["selected_mask"] = json::array();
  for (bool b : m.selected_mask) j["selected_mask"].push_back(b ? 1 : 0);
  j["importances"] = m.importances;
  j["training_fingerprint"] = hex16(m.training_fingerprint);

  json trees = json::array();
  for (const auto& tree : m.trees) {
    json t;
    std::vector<int32_t> feature, left, right;
    std::vector<double> threshold, value;
    for (const auto& node : tree.nodes) {
      feature.push_back(node.feature);
      threshold.push_back(node.threshold);
      left.push_back(node.left);
      right.push_back(node.right);
      value.push_back(node.value);
    }
    t["feature"] = feature;
    t["threshold"] = threshold;
    t["left"] = left;
    t["right"] = right;
    t["value"] = value;
    trees.push_back(std::move(t));
  }
  j["trees"] = std::move(trees);

  std::ofstream out(path);
  if (!out) throw InputError("cannot write model file " + path);
  out << j.dump() << "\n";
}

QualityModel load_model(const std::string& path) {
  if (!std::filesystem::exists(path)) throw MissingFile("model file not found: " + path);
  std::ifstream in(path);
  if (!in) throw MissingFile("cannot open model file " + path);

  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw CorruptFile("model file " + path + " is not valid JSON: " + e.what());
  }

  try {
    if (j.at("format").get<std::string>() != "pcqa-model") {
      throw CorruptFile("model file " + path + " has wrong format tag");
    }
    if (j.at("version").get<int>() != kModelFormatVersion) {
      throw VersionMismatch("model file " + path + " uses format version " +
                            std::to_string(j.at("version").get<int>()));
    }
    QualityModel m;
    m.layout_version = j.at("layout_version").get<int>();
    if (m.layout_version != kLayoutVersion) {
      throw VersionMismatch("model layout_version " + std::to_string(m.layout_version) +
                            " does not match this build (" + std::to_string(kLayoutVersion) + ")");
    }
    const json& p = j.at("params");
    m.params.n_trees = p.at("n_trees").get<int>();
    m.params.max_depth = p.at("max_depth").get<int>();
    m.params.min_leaf = p.at("min_leaf").get<int>();
    m.params.features_per_split = p.at("features_per_split").get<double>();
    m.params.bootstrap = p.at("bootstrap").get<bool>();
    m.params.seed = p.at("seed").get<uint64_t>();

    for (int v : j.at("selected_mask").get<std::vector<int>>()) m.selected_mask.push_back(v != 0);
    m.importances = j.at("importances").get<std::vector<double>>();
    if (m.importances.size() != m.selected_mask.size()) {
      throw CorruptFile("model file " + path + ": mask and importance widths differ");
    }

    for (const json& t : j.at("trees")) {
      const auto feature = t.at("feature").get<std::vector<int32_t>>();
      const auto threshold = t.at("threshold").get<std::vector<double>>();
      const auto left = t.at("left").get<std::vector<int32_t>>();
      const auto right = t.at("right").get<std::vector<int32_t>>();
      const auto value = t.at("value").get<std::vector<double>>();
      const std::size_t n = feature.size();
      if (threshold.size() != n || left.size() != n || right.size() != n || value.size() != n ||
          n == 0) {
        throw CorruptFile("model file " + path + ": inconsistent tree arrays");
      }
      RegressionTree tree;
      tree.nodes.resize(n);
      const auto width = static_cast<int32_t>(m.importances.size());
      for (std::size_t i = 0; i < n; ++i) {
        TreeNode& node = tree.nodes[i];
        node.feature = feature[i];
        node.threshold = threshold[i];
        node.left = left[i];
        node.right = right[i];
        node.value = value[i];
        if (node.feature >= width ||
            (node.feature >= 0 &&
             (node.left < 0 || node.right < 0 || node.left >= static_cast<int32_t>(n) ||
              node.right >= static_cast<int32_t>(n)))) {
          throw CorruptFile("model file " + path + ": node indices out of range");
        }
      }
      m.trees.push_back(std::move(tree));
    }
    if (m.trees.empty()) throw CorruptFile("model file " + path + " contains no trees");

    uint64_t fp = 0;
    const std::string hex = j.at("training_fingerprint").get<std::string>();
    for (char c : hex) {
      const int d = c >= '0' && c <= '9' ? c - '0' : (c >= 'a' && c <= 'f' ? c - 'a' + 10 : -1);
      if (d < 0) throw CorruptFile("model file " + path + ": bad fingerprint");
      fp = (fp << 4) | static_cast<uint64_t>(d);
    }
    m.training_fingerprint = fp;
    return m;
  } catch (const json::exception& e) {
    throw CorruptFile("model file " + path + " is missing fields: " + e.what());
  }
}

}  // namespace pcqa

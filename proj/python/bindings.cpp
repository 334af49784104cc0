// Python bindings for the core pipeline: feature extraction, model scoring,
// synthetic cloud generation and the two correlation helpers. Thin wrappers
// over the same entry points the CLI uses, so Python results match `pcqa`
// byte for byte.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "pcqa/errors.hpp"
#include "pcqa/evaluation.hpp"
#include "pcqa/features.hpp"
#include "pcqa/model_io.hpp"
#include "pcqa/ply_io.hpp"
#include "pcqa/point_cloud.hpp"
#include "pcqa/rng.hpp"
#include "pcqa/synth.hpp"

namespace py = pybind11;

namespace {

pcqa::PointCloud load_cloud(const std::string& path, const std::string& color_space) {
  pcqa::PointCloud pc = pcqa::load_ply(path);
  if (color_space == "ycbcr") return pcqa::assume_ycbcr(pc);
  if (color_space != "rgb") {
    throw pcqa::BadArgument("color_space must be 'rgb' or 'ycbcr', got '" + color_space + "'");
  }
  return pc;
}

std::vector<double> extract(const std::string& ref_path, const std::string& dist_path, int k,
                            int threads, const std::string& color_space) {
  const pcqa::PointCloud ref = load_cloud(ref_path, color_space);
  const pcqa::PointCloud dist = load_cloud(dist_path, color_space);
  const pcqa::FeatureVector fv = pcqa::extract_features(ref, dist, k, threads);
  return std::vector<double>(fv.f.begin(), fv.f.end());
}

double score(const std::string& model_path, const std::string& ref_path,
             const std::string& dist_path, int k, int threads, const std::string& color_space) {
  const pcqa::QualityModel model = pcqa::load_model(model_path);
  const std::vector<double> row = extract(ref_path, dist_path, k, threads, color_space);
  return pcqa::predict(model, row);
}

std::size_t synth(const std::string& shape, std::size_t n, uint64_t seed,
                  const std::string& out_path, const std::string& distort, bool binary) {
  pcqa::PointCloud pc = pcqa::make_reference(pcqa::parse_shape(shape), n, seed);
  if (!distort.empty()) {
    uint64_t st = seed;
    (void)pcqa::splitmix64(st);
    pc = pcqa::apply_distortion(pc, pcqa::parse_distortion(distort, pcqa::splitmix64(st)));
  }
  std::ostringstream cfg;
  cfg << "pcqa-synth shape=" << shape << " n=" << n << " seed=" << seed;
  if (!distort.empty()) cfg << " distort=" << distort;
  if (binary) {
    pcqa::save_ply_binary(pc, out_path, cfg.str());
  } else {
    pcqa::save_ply_ascii(pc, out_path, cfg.str());
  }
  return pc.size();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Full-reference point cloud quality assessment core";

  py::register_exception<pcqa::InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<pcqa::ModelError>(m, "ModelError", PyExc_RuntimeError);

  m.attr("LAYOUT_VERSION") = pcqa::kLayoutVersion;
  m.attr("FEATURE_COUNT") = static_cast<int>(pcqa::kFeatureCount);
  m.attr("DEFAULT_K") = 81;

  m.def(
      "feature_names",
      [] {
        const auto& names = pcqa::feature_names();
        return std::vector<std::string>(names.begin(), names.end());
      },
      "Canonical names of the pooled feature vector, in layout order.");

  m.def("extract", &extract, py::arg("ref"), py::arg("dist"), py::arg("k") = 81,
        py::arg("threads") = 1, py::arg("color_space") = "rgb",
        py::call_guard<py::gil_scoped_release>(),
        "Extract the pooled feature vector for a reference/distorted PLY pair.");

  m.def("score", &score, py::arg("model"), py::arg("ref"), py::arg("dist"), py::arg("k") = 81,
        py::arg("threads") = 1, py::arg("color_space") = "rgb",
        py::call_guard<py::gil_scoped_release>(),
        "Extract features for a pair and run them through a trained model file.");

  m.def(
      "predict",
      [](const std::string& model_path, const std::vector<double>& features) {
        return pcqa::predict(pcqa::load_model(model_path), features);
      },
      py::arg("model"), py::arg("features"),
      "Run an already-extracted feature row through a trained model file.");

  m.def("synth", &synth, py::arg("shape"), py::arg("n"), py::arg("seed"), py::arg("out"),
        py::arg("distort") = "", py::arg("binary") = false,
        "Write a synthetic reference (optionally distorted) to a PLY file; "
        "returns the point count.");

  m.def(
      "srocc",
      [](const std::vector<double>& x, const std::vector<double>& y) { return pcqa::srocc(x, y); },
      py::arg("x"), py::arg("y"), "Spearman rank-order correlation coefficient.");

  m.def(
      "plcc",
      [](const std::vector<double>& x, const std::vector<double>& y) { return pcqa::plcc(x, y); },
      py::arg("x"), py::arg("y"), "Pearson linear correlation coefficient.");
}

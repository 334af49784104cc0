#pragma once

#include <cstdint>
#include <string>

#include "pcqa/point_cloud.hpp"

namespace pcqa {

enum class Shape { Plane, Sphere, CubeVolume, Torus, ColoredGradientSphere };

enum class DistortionKind {
  GeomGaussNoise,   // level = sigma as fraction of the bounding-box diagonal
  GeomQuantize,     // level = quantization step in coordinate units
  Downsample,       // level = keep fraction in (0, 1]
  ColorGaussNoise,  // level = sigma as fraction of the channel range
  ColorQuantize,    // level = step as fraction of the channel range
};

struct DistortionSpec {
  DistortionKind kind = DistortionKind::GeomGaussNoise;
  double level = 0.0;
  uint64_t seed = 0;
};

// Deterministic sampled shape with a smooth color field; positions stay in
// the unit bounding box. Colors are RGB on the 0..255 scale.
PointCloud make_reference(Shape shape, std::size_t n, uint64_t seed);

// Seeded, deterministic transform. Point count preserved except Downsample.
PointCloud apply_distortion(const PointCloud& pc, const DistortionSpec& spec);

Shape parse_shape(const std::string& name);
const char* shape_name(Shape s);

// Parses "kind:level", e.g. "geom_gauss_noise:0.005".
DistortionSpec parse_distortion(const std::string& text, uint64_t seed);
const char* distortion_name(DistortionKind k);

}  // namespace pcqa

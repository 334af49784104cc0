#include "pcqa/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "pcqa/errors.hpp"
#include "pcqa/rng.hpp"

namespace pcqa {

namespace {

Vec3 smooth_color(const Vec3& p) {
  return {255.0 * p.x, 255.0 * p.y, 255.0 * p.z};
}

Vec3 gradient_color(const Vec3& p) {
  const double s = 0.5 * (1.0 + std::sin(4.0 * std::numbers::pi * p.x));
  const double t = 0.5 * (1.0 + std::cos(4.0 * std::numbers::pi * p.y));
  return {255.0 * s, 255.0 * t, 255.0 * p.z};
}

Vec3 unit_direction(Rng& rng) {
  while (true) {
    const Vec3 v{rng.normal(), rng.normal(), rng.normal()};
    const double n = norm(v);
    if (n > 1e-6) return v / n;
  }
}

double bbox_diagonal(const PointCloud& pc) {
  Vec3 lo = pc.positions.front(), hi = lo;
  for (const Vec3& p : pc.positions) {
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  }
  return norm(hi - lo);
}

}  // namespace

PointCloud make_reference(Shape shape, std::size_t n, uint64_t seed) {
  if (n < 10) throw BadArgument("reference cloud needs at least 10 points");
  PointCloud pc;
  pc.color_space = ColorSpace::RGB8;
  pc.positions.reserve(n);
  pc.colors.reserve(n);
  Rng rng(seed);

  for (std::size_t i = 0; i < n; ++i) {
    Vec3 p;
    switch (shape) {
      case Shape::Plane:
        p = {rng.uniform01(), rng.uniform01(), 0.0};
        break;
      case Shape::Sphere:
      case Shape::ColoredGradientSphere:
        p = unit_direction(rng) * 0.5 + Vec3{0.5, 0.5, 0.5};
        break;
      case Shape::CubeVolume:
        p = {rng.uniform01(), rng.uniform01(), rng.uniform01()};
        break;
      case Shape::Torus: {
        const double u = 2.0 * std::numbers::pi * rng.uniform01();
        const double v = 2.0 * std::numbers::pi * rng.uniform01();
        const double ring = 0.35 + 0.15 * std::cos(v);
        p = {0.5 + ring * std::cos(u), 0.5 + ring * std::sin(u), 0.5 + 0.15 * std::sin(v)};
        break;
      }
    }
    pc.positions.push_back(p);
    pc.colors.push_back(shape == Shape::ColoredGradientSphere ? gradient_color(p)
                                                              : smooth_color(p));
  }
  return pc;
}

PointCloud apply_distortion(const PointCloud& pc, const DistortionSpec& spec) {
  if (pc.empty()) throw EmptyCloud("cannot distort an empty cloud");
  if (!(spec.level > 0.0)) throw BadArgument("distortion level must be positive");

  PointCloud out = pc;
  Rng rng(spec.seed);

  switch (spec.kind) {
    case DistortionKind::GeomGaussNoise: {
      const double sigma = spec.level * bbox_diagonal(pc);
      for (Vec3& p : out.positions) {
        p.x += sigma * rng.normal();
        p.y += sigma * rng.normal();
        p.z += sigma * rng.normal();
      }
      break;
    }
    case DistortionKind::GeomQuantize: {
      const double q = spec.level;
      for (Vec3& p : out.positions) {
        p.x = std::round(p.x / q) * q;
        p.y = std::round(p.y / q) * q;
        p.z = std::round(p.z / q) * q;
      }
      break;
    }
    case DistortionKind::Downsample: {
      if (spec.level > 1.0) throw BadArgument("keep fraction must be in (0, 1]");
      const std::size_t n = pc.size();
      const std::size_t keep =
          std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(spec.level * n)));
      std::vector<std::size_t> idx(n);
      std::iota(idx.begin(), idx.end(), 0);
      for (std::size_t j = 0; j < keep; ++j) {
        const auto pick = j + rng.uniform_index(n - j);
        std::swap(idx[j], idx[pick]);
      }
      idx.resize(keep);
      std::sort(idx.begin(), idx.end());
      PointCloud kept;
      kept.color_space = pc.color_space;
      kept.positions.reserve(keep);
      kept.colors.reserve(keep);
      for (std::size_t i : idx) {
        kept.positions.push_back(pc.positions[i]);
        if (!pc.colors.empty()) kept.colors.push_back(pc.colors[i]);
      }
      return kept;
    }
    case DistortionKind::ColorGaussNoise: {
      const double scale = pc.color_space == ColorSpace::RGB8 ? 255.0 : 1.0;
      const double sigma = spec.level * scale;
      for (Vec3& c : out.colors) {
        for (int a = 0; a < 3; ++a) {
          c[a] = std::clamp(c[a] + sigma * rng.normal(), 0.0, scale);
        }
      }
      break;
    }
    case DistortionKind::ColorQuantize: {
      const double scale = pc.color_space == ColorSpace::RGB8 ? 255.0 : 1.0;
      const double q = spec.level * scale;
      for (Vec3& c : out.colors) {
        for (int a = 0; a < 3; ++a) {
          c[a] = std::clamp(std::round(c[a] / q) * q, 0.0, scale);
        }
      }
      break;
    }
  }
  return out;
}

Shape parse_shape(const std::string& name) {
  if (name == "plane") return Shape::Plane;
  if (name == "sphere") return Shape::Sphere;
  if (name == "cube_volume") return Shape::CubeVolume;
  if (name == "torus") return Shape::Torus;
  if (name == "colored_gradient_sphere") return Shape::ColoredGradientSphere;
  throw BadArgument("unknown shape '" + name +
                    "' (plane, sphere, cube_volume, torus, colored_gradient_sphere)");
}

const char* shape_name(Shape s) {
  switch (s) {
    case Shape::Plane: return "plane";
    case Shape::Sphere: return "sphere";
    case Shape::CubeVolume: return "cube_volume";
    case Shape::Torus: return "torus";
    case Shape::ColoredGradientSphere: return "colored_gradient_sphere";
  }
  return "?";
}

DistortionSpec parse_distortion(const std::string& text, uint64_t seed) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw BadArgument("distortion must be kind:level, got '" + text + "'");
  }
  const std::string kind = text.substr(0, colon);
  DistortionSpec spec;
  spec.seed = seed;
  try {
    spec.level = std::stod(text.substr(colon + 1));
  } catch (const std::exception&) {
    throw BadArgument("bad distortion level in '" + text + "'");
  }
  if (kind == "geom_gauss_noise") {
    spec.kind = DistortionKind::GeomGaussNoise;
  } else if (kind == "geom_quantize") {
    spec.kind = DistortionKind::GeomQuantize;
  } else if (kind == "downsample") {
    spec.kind = DistortionKind::Downsample;
  } else if (kind == "color_gauss_noise") {
    spec.kind = DistortionKind::ColorGaussNoise;
  } else if (kind == "color_quantize") {
    spec.kind = DistortionKind::ColorQuantize;
  } else {
    throw BadArgument("unknown distortion kind '" + kind + "'");
  }
  return spec;
}

const char* distortion_name(DistortionKind k) {
  switch (k) {
    case DistortionKind::GeomGaussNoise: return "geom_gauss_noise";
    case DistortionKind::GeomQuantize: return "geom_quantize";
    case DistortionKind::Downsample: return "downsample";
    case DistortionKind::ColorGaussNoise: return "color_gauss_noise";
    case DistortionKind::ColorQuantize: return "color_quantize";
  }
  return "?";
}

}  // namespace pcqa

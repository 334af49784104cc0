#include "pcqa/point_cloud.hpp"

#include <algorithm>
#include <cstring>
#include <unordered_map>

#include "pcqa/errors.hpp"
#include "pcqa/hash.hpp"

namespace pcqa {

namespace {

struct CoordKey {
  uint64_t bits[3];
  bool operator==(const CoordKey& o) const {
    return bits[0] == o.bits[0] && bits[1] == o.bits[1] && bits[2] == o.bits[2];
  }
};

struct CoordKeyHash {
  std::size_t operator()(const CoordKey& k) const {
    return static_cast<std::size_t>(fnv1a64(k.bits, sizeof(k.bits)));
  }
};

CoordKey key_of(const Vec3& p) {
  CoordKey k;
  std::memcpy(&k.bits[0], &p.x, sizeof(double));
  std::memcpy(&k.bits[1], &p.y, sizeof(double));
  std::memcpy(&k.bits[2], &p.z, sizeof(double));
  return k;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

PointCloud merge_duplicates(const PointCloud& pc) {
  if (pc.empty()) throw EmptyCloud("merge_duplicates: empty point cloud");

  std::unordered_map<CoordKey, std::size_t, CoordKeyHash> slot;
  slot.reserve(pc.size());

  PointCloud out;
  out.color_space = pc.color_space;
  out.positions.reserve(pc.size());
  out.colors.reserve(pc.size());
  std::vector<std::size_t> counts;

  for (std::size_t i = 0; i < pc.size(); ++i) {
    auto [it, inserted] = slot.try_emplace(key_of(pc.positions[i]), out.positions.size());
    if (inserted) {
      out.positions.push_back(pc.positions[i]);
      out.colors.push_back(pc.colors[i]);
      counts.push_back(1);
    } else {
      out.colors[it->second] += pc.colors[i];
      ++counts[it->second];
    }
  }
  for (std::size_t i = 0; i < out.colors.size(); ++i) {
    if (counts[i] > 1) out.colors[i] = out.colors[i] / static_cast<double>(counts[i]);
  }
  return out;
}

PointCloud rgb_to_ycbcr(const PointCloud& pc) {
  if (pc.color_space == ColorSpace::YCbCr)
    throw AlreadyConverted("rgb_to_ycbcr: cloud is already YCbCr");

  PointCloud out;
  out.color_space = ColorSpace::YCbCr;
  out.positions = pc.positions;
  out.colors.resize(pc.size());
  for (std::size_t i = 0; i < pc.size(); ++i) {
    const double r = pc.colors[i].x / 255.0;
    const double g = pc.colors[i].y / 255.0;
    const double b = pc.colors[i].z / 255.0;
    const double y = 0.2126 * r + 0.7152 * g + 0.0722 * b;
    const double cb = (b - y) / 1.8556 + 0.5;
    const double cr = (r - y) / 1.5748 + 0.5;
    out.colors[i] = {clamp01(y), clamp01(cb), clamp01(cr)};
  }
  return out;
}

PointCloud assume_ycbcr(const PointCloud& pc) {
  if (pc.color_space == ColorSpace::YCbCr) return pc;
  PointCloud out;
  out.color_space = ColorSpace::YCbCr;
  out.positions = pc.positions;
  out.colors.resize(pc.size());
  for (std::size_t i = 0; i < pc.size(); ++i) {
    out.colors[i] = {clamp01(pc.colors[i].x / 255.0), clamp01(pc.colors[i].y / 255.0),
                     clamp01(pc.colors[i].z / 255.0)};
  }
  return out;
}

uint64_t cloud_hash(const PointCloud& pc) {
  uint64_t h = fnv1a64(static_cast<uint64_t>(pc.size()), 0xcbf29ce484222325ULL);
  h = fnv1a64(static_cast<uint64_t>(pc.color_space), h);
  for (const auto& p : pc.positions) {
    h = fnv1a64(p.x, h);
    h = fnv1a64(p.y, h);
    h = fnv1a64(p.z, h);
  }
  for (const auto& c : pc.colors) {
    h = fnv1a64(c.x, h);
    h = fnv1a64(c.y, h);
    h = fnv1a64(c.z, h);
  }
  return h;
}

}  // namespace pcqa

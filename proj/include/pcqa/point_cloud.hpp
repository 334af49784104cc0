#pragma once

#include <cstdint>
#include <vector>

#include "pcqa/geometry.hpp"

namespace pcqa {

enum class ColorSpace { RGB8, YCbCr };

// Immutable after construction by convention: the pipeline never mutates a
// cloud in place, every transform returns a new one.
struct PointCloud {
  std::vector<Vec3> positions;
  // RGB8: channel values on the 0..255 scale as read from file.
  // YCbCr: all channels normalized to [0, 1].
  std::vector<Vec3> colors;
  ColorSpace color_space = ColorSpace::RGB8;

  std::size_t size() const { return positions.size(); }
  bool empty() const { return positions.empty(); }
};

// Collapses points with bitwise-identical coordinates into one point whose
// color is the arithmetic mean of the merged colors. First-occurrence order
// of distinct coordinates is preserved. Idempotent.
PointCloud merge_duplicates(const PointCloud& pc);

// BT.709 full-range conversion; inputs are 0..255 RGB, outputs in [0, 1]
// with the +0.5 chroma offset. Throws AlreadyConverted on YCbCr input.
PointCloud rgb_to_ycbcr(const PointCloud& pc);

// Marks colors as already-YCbCr data stored on the 0..255 scale (bypasses
// the matrix, only normalizes to [0, 1]).
PointCloud assume_ycbcr(const PointCloud& pc);

// Content fingerprint over point count, coordinates and colors (bit-exact).
uint64_t cloud_hash(const PointCloud& pc);

}  // namespace pcqa

#pragma once

#include <string>

#include "pcqa/point_cloud.hpp"

namespace pcqa {

// Reads ASCII or binary_little_endian PLY. Requires x,y,z and red,green,blue
// vertex properties; everything else (normals, alpha, faces) is skipped with
// a one-line warning on stderr. Point order follows the file.
PointCloud load_ply(const std::string& path);

// Writers keep double precision: ASCII uses round-trippable formatting,
// binary stores float64 coordinates. Colors are written as uchar for RGB8
// clouds; YCbCr clouds are rescaled to 0..255 and rounded.
// A non-empty `comment` is written as a header comment line.
void save_ply_ascii(const PointCloud& pc, const std::string& path,
                    const std::string& comment = "");
void save_ply_binary(const PointCloud& pc, const std::string& path,
                     const std::string& comment = "");

}  // namespace pcqa

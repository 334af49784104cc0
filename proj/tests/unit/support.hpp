#pragma once

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "pcqa/point_cloud.hpp"
#include "pcqa/rng.hpp"

namespace pcqa::test {

inline PointCloud random_cloud(Rng& rng, std::size_t n, double extent = 1.0,
                               bool with_color = true) {
  PointCloud pc;
  pc.positions.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    pc.positions.push_back(
        {rng.uniform01() * extent, rng.uniform01() * extent, rng.uniform01() * extent});
  }
  if (with_color) {
    pc.colors.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      pc.colors.push_back(
          {rng.uniform01() * 255.0, rng.uniform01() * 255.0, rng.uniform01() * 255.0});
    }
  }
  return pc;
}

// Unique temp path under the system temp dir; caller removes the file.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    dir_ = std::filesystem::temp_directory_path() /
           ("pcqa_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string dir() const { return dir_.string(); }

 private:
  std::filesystem::path dir_;
};

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace pcqa::test

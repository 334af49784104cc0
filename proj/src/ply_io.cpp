#include "pcqa/ply_io.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "pcqa/errors.hpp"

namespace pcqa {

namespace {

enum class PlyType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

std::size_t type_size(PlyType t) {
  switch (t) {
    case PlyType::Int8:
    case PlyType::UInt8:
      return 1;
    case PlyType::Int16:
    case PlyType::UInt16:
      return 2;
    case PlyType::Int32:
    case PlyType::UInt32:
    case PlyType::Float32:
      return 4;
    case PlyType::Float64:
      return 8;
  }
  return 0;
}

PlyType parse_type(const std::string& s) {
  if (s == "char" || s == "int8") return PlyType::Int8;
  if (s == "uchar" || s == "uint8") return PlyType::UInt8;
  if (s == "short" || s == "int16") return PlyType::Int16;
  if (s == "ushort" || s == "uint16") return PlyType::UInt16;
  if (s == "int" || s == "int32") return PlyType::Int32;
  if (s == "uint" || s == "uint32") return PlyType::UInt32;
  if (s == "float" || s == "float32") return PlyType::Float32;
  if (s == "double" || s == "float64") return PlyType::Float64;
  throw MalformedHeader("ply: unknown property type '" + s + "'");
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::Float32;
  bool is_list = false;
  PlyType count_type = PlyType::UInt8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

double read_binary_value(std::istream& in, PlyType t) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(type_size(t)));
  if (!in) throw TruncatedBody("ply: body ends before declared element count");
  switch (t) {
    case PlyType::Int8:
      return static_cast<double>(static_cast<int8_t>(buf[0]));
    case PlyType::UInt8:
      return static_cast<double>(buf[0]);
    case PlyType::Int16: {
      int16_t v;
      std::memcpy(&v, buf, 2);
      return v;
    }
    case PlyType::UInt16: {
      uint16_t v;
      std::memcpy(&v, buf, 2);
      return v;
    }
    case PlyType::Int32: {
      int32_t v;
      std::memcpy(&v, buf, 4);
      return v;
    }
    case PlyType::UInt32: {
      uint32_t v;
      std::memcpy(&v, buf, 4);
      return v;
    }
    case PlyType::Float32: {
      float v;
      std::memcpy(&v, buf, 4);
      return v;
    }
    case PlyType::Float64: {
      double v;
      std::memcpy(&v, buf, 8);
      return v;
    }
  }
  return 0.0;
}

double read_ascii_value(std::istream& in) {
  double v;
  if (!(in >> v)) throw TruncatedBody("ply: body ends before declared element count");
  return v;
}

}  // namespace

PointCloud load_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw MalformedHeader("ply: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "ply") throw MalformedHeader("ply: missing magic line");

  bool binary = false;
  bool format_seen = false;
  std::vector<PlyElement> elements;
  bool header_done = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "comment" || tok == "obj_info" || tok.empty()) continue;
    if (tok == "format") {
      std::string fmt, ver;
      ls >> fmt >> ver;
      if (fmt == "ascii")
        binary = false;
      else if (fmt == "binary_little_endian")
        binary = true;
      else
        throw MalformedHeader("ply: unsupported format '" + fmt + "'");
      format_seen = true;
    } else if (tok == "element") {
      PlyElement e;
      if (!(ls >> e.name >> e.count)) throw MalformedHeader("ply: bad element line");
      elements.push_back(e);
    } else if (tok == "property") {
      if (elements.empty()) throw MalformedHeader("ply: property before element");
      PlyProperty p;
      std::string t;
      ls >> t;
      if (t == "list") {
        std::string ct, vt;
        if (!(ls >> ct >> vt >> p.name)) throw MalformedHeader("ply: bad list property");
        p.is_list = true;
        p.count_type = parse_type(ct);
        p.type = parse_type(vt);
      } else {
        p.type = parse_type(t);
        if (!(ls >> p.name)) throw MalformedHeader("ply: bad property line");
      }
      elements.back().properties.push_back(p);
    } else if (tok == "end_header") {
      header_done = true;
      break;
    } else {
      throw MalformedHeader("ply: unexpected header token '" + tok + "'");
    }
  }
  if (!header_done) throw MalformedHeader("ply: missing end_header");
  if (!format_seen) throw MalformedHeader("ply: missing format line");

  const PlyElement* vertex = nullptr;
  for (const auto& e : elements)
    if (e.name == "vertex") vertex = &e;
  if (vertex == nullptr || vertex->count == 0)
    throw MalformedHeader("ply: no vertex element");

  int idx_pos[3] = {-1, -1, -1};
  int idx_col[3] = {-1, -1, -1};
  bool ignored = false;
  for (std::size_t i = 0; i < vertex->properties.size(); ++i) {
    const auto& p = vertex->properties[i];
    if (p.is_list) {
      ignored = true;
      continue;
    }
    if (p.name == "x")
      idx_pos[0] = static_cast<int>(i);
    else if (p.name == "y")
      idx_pos[1] = static_cast<int>(i);
    else if (p.name == "z")
      idx_pos[2] = static_cast<int>(i);
    else if (p.name == "red")
      idx_col[0] = static_cast<int>(i);
    else if (p.name == "green")
      idx_col[1] = static_cast<int>(i);
    else if (p.name == "blue")
      idx_col[2] = static_cast<int>(i);
    else
      ignored = true;
  }
  if (idx_pos[0] < 0 || idx_pos[1] < 0 || idx_pos[2] < 0)
    throw MalformedHeader("ply: vertex element lacks x/y/z");
  if (idx_col[0] < 0 || idx_col[1] < 0 || idx_col[2] < 0)
    throw MissingProperty("ply: vertex element lacks red/green/blue");
  if (ignored)
    std::cerr << "warning: '" << path << "': ignoring vertex properties beyond position/color\n";

  PointCloud pc;
  pc.color_space = ColorSpace::RGB8;
  pc.positions.resize(vertex->count);
  pc.colors.resize(vertex->count);

  for (const auto& e : elements) {
    if (&e == vertex) {
      const std::size_t np = e.properties.size();
      std::vector<double> row(np);
      for (std::size_t v = 0; v < e.count; ++v) {
        for (std::size_t p = 0; p < np; ++p) {
          if (e.properties[p].is_list) {
            const std::size_t cnt = static_cast<std::size_t>(
                binary ? read_binary_value(in, e.properties[p].count_type) : read_ascii_value(in));
            for (std::size_t j = 0; j < cnt; ++j)
              binary ? read_binary_value(in, e.properties[p].type) : read_ascii_value(in);
            row[p] = 0.0;
          } else {
            row[p] = binary ? read_binary_value(in, e.properties[p].type) : read_ascii_value(in);
          }
        }
        pc.positions[v] = {row[idx_pos[0]], row[idx_pos[1]], row[idx_pos[2]]};
        pc.colors[v] = {row[idx_col[0]], row[idx_col[1]], row[idx_col[2]]};
      }
    } else {
      // Skip foreign elements value by value (lists make byte-skips unsafe).
      for (std::size_t v = 0; v < e.count; ++v) {
        for (const auto& p : e.properties) {
          if (p.is_list) {
            const std::size_t cnt = static_cast<std::size_t>(
                binary ? read_binary_value(in, p.count_type) : read_ascii_value(in));
            for (std::size_t j = 0; j < cnt; ++j)
              binary ? read_binary_value(in, p.type) : read_ascii_value(in);
          } else {
            binary ? read_binary_value(in, p.type) : read_ascii_value(in);
          }
        }
      }
    }
  }
  return pc;
}

namespace {

unsigned char color_byte(double v, ColorSpace cs) {
  const double scaled = cs == ColorSpace::YCbCr ? v * 255.0 : v;
  const double r = std::clamp(scaled, 0.0, 255.0);
  return static_cast<unsigned char>(std::lround(r));
}

void write_header(std::ostream& out, const PointCloud& pc, bool binary,
                  const std::string& comment) {
  out << "ply\n";
  out << (binary ? "format binary_little_endian 1.0\n" : "format ascii 1.0\n");
  if (!comment.empty()) out << "comment " << comment << "\n";
  out << "element vertex " << pc.size() << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out << "end_header\n";
}

}  // namespace

void save_ply_ascii(const PointCloud& pc, const std::string& path, const std::string& comment) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  write_header(out, pc, false, comment);
  char buf[128];
  const Vec3 black;
  for (std::size_t i = 0; i < pc.size(); ++i) {
    const auto& p = pc.positions[i];
    const auto& c = i < pc.colors.size() ? pc.colors[i] : black;
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g %u %u %u\n", p.x, p.y, p.z,
                  color_byte(c.x, pc.color_space), color_byte(c.y, pc.color_space),
                  color_byte(c.z, pc.color_space));
    out << buf;
  }
}

void save_ply_binary(const PointCloud& pc, const std::string& path, const std::string& comment) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  write_header(out, pc, true, comment);
  const Vec3 black;
  for (std::size_t i = 0; i < pc.size(); ++i) {
    const auto& p = pc.positions[i];
    out.write(reinterpret_cast<const char*>(&p.x), 8);
    out.write(reinterpret_cast<const char*>(&p.y), 8);
    out.write(reinterpret_cast<const char*>(&p.z), 8);
    const auto& c = i < pc.colors.size() ? pc.colors[i] : black;
    const unsigned char rgb[3] = {color_byte(c.x, pc.color_space),
                                  color_byte(c.y, pc.color_space),
                                  color_byte(c.z, pc.color_space)};
    out.write(reinterpret_cast<const char*>(rgb), 3);
  }
}

}  // namespace pcqa

#include "crossreg/io/ply.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace crossreg::io {

void write_ply(const std::string& path, const PointCloud& c) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "ply\n"
      << "format ascii 1.0\n"
      << "element vertex " << c.size() << "\n"
      << "property float x\n"
      << "property float y\n"
      << "property float z\n"
      << "end_header\n";
  char buf[96];
  for (const Vec3& p : c.points) {
    std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g\n", static_cast<double>(static_cast<float>(p.x())),
                  static_cast<double>(static_cast<float>(p.y())),
                  static_cast<double>(static_cast<float>(p.z())));
    out << buf;
  }
  if (!out) throw std::runtime_error("error writing " + path);
}

PointCloud read_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);

  std::size_t offset = 0;
  auto next_line = [&](std::string& line) -> bool {
    offset = static_cast<std::size_t>(in.tellg());
    return static_cast<bool>(std::getline(in, line));
  };

  std::string line;
  if (!next_line(line) || line != "ply") throw PlyParseError(path, offset, "missing ply signature");

  std::size_t vertex_count = 0;
  bool have_format = false;
  bool have_count = false;
  std::vector<std::string> properties;
  while (next_line(line)) {
    if (line == "end_header") break;
    std::istringstream ss(line);
    std::string tok;
    ss >> tok;
    if (tok == "comment") continue;
    if (tok == "format") {
      std::string kind;
      ss >> kind;
      if (kind != "ascii") throw PlyParseError(path, offset, "only ascii format supported");
      have_format = true;
    } else if (tok == "element") {
      std::string name;
      ss >> name >> vertex_count;
      if (name != "vertex") throw PlyParseError(path, offset, "unsupported element: " + name);
      have_count = true;
    } else if (tok == "property") {
      std::string type, name;
      ss >> type >> name;
      properties.push_back(name);
    } else if (!tok.empty()) {
      throw PlyParseError(path, offset, "unexpected header token: " + tok);
    }
    if (in.eof()) throw PlyParseError(path, offset, "unterminated header");
  }
  if (!have_format || !have_count) throw PlyParseError(path, offset, "incomplete header");
  if (properties.size() < 3 || properties[0] != "x" || properties[1] != "y" ||
      properties[2] != "z") {
    throw PlyParseError(path, offset, "expected properties x y z");
  }

  PointCloud c;
  c.points.reserve(vertex_count);
  for (std::size_t i = 0; i < vertex_count; ++i) {
    if (!next_line(line)) throw PlyParseError(path, offset, "unexpected end of vertex data");
    std::istringstream ss(line);
    float x, y, z;
    if (!(ss >> x >> y >> z)) {
      throw PlyParseError(path, offset, "malformed vertex line " + std::to_string(i));
    }
    c.points.emplace_back(x, y, z);
  }
  return c;
}

}  // namespace crossreg::io

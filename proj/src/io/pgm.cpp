#include "crossreg/io/pgm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace crossreg::io {

void write_pgm(const std::string& path, const sim::ViewImage& img) {
  if (!img.valid()) throw std::invalid_argument("invalid view image");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "P2\n" << img.width << " " << img.height << "\n65535\n";
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      const double v = std::clamp(img.values(r, c), 0.0, 1.0);
      out << static_cast<int>(std::llround(v * 65535.0));
      out << (c + 1 == img.width ? '\n' : ' ');
    }
  }
  if (!out) throw std::runtime_error("error writing " + path);
}

sim::ViewImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string magic;
  in >> magic;
  if (magic != "P2") throw std::runtime_error("not a plain P2 PGM: " + path);
  int w = 0, h = 0, maxval = 0;
  in >> w >> h >> maxval;
  if (!in || w < 8 || h < 8 || maxval <= 0) throw std::runtime_error("bad PGM header: " + path);
  sim::ViewImage img;
  img.width = w;
  img.height = h;
  img.values.resize(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      long v = 0;
      if (!(in >> v)) throw std::runtime_error("truncated PGM data: " + path);
      img.values(r, c) = static_cast<double>(v) / maxval;
    }
  }
  return img;
}

}  // namespace crossreg::io

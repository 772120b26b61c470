#include "crossreg/io/meta.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace crossreg::io {

void write_meta(const std::string& path, const PairMeta& meta) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  char buf[64];
  out << "gt =";
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      std::snprintf(buf, sizeof(buf), " %.17g", meta.gt.rotation(r, c));
      out << buf;
    }
  }
  for (int i = 0; i < 3; ++i) {
    std::snprintf(buf, sizeof(buf), " %.17g", meta.gt.translation[i]);
    out << buf;
  }
  out << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", meta.overlap);
  out << "overlap = " << buf << "\n";
  out << "seed = " << meta.seed << "\n";
  if (!out) throw std::runtime_error("error writing " + path);
}

PairMeta read_meta(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  PairMeta meta;
  bool have_gt = false;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, line.find_first_of(" ="));
    std::istringstream val(line.substr(eq + 1));
    if (key == "gt") {
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
          if (!(val >> meta.gt.rotation(r, c))) throw std::runtime_error("bad gt in " + path);
        }
      }
      for (int i = 0; i < 3; ++i) {
        if (!(val >> meta.gt.translation[i])) throw std::runtime_error("bad gt in " + path);
      }
      have_gt = true;
    } else if (key == "overlap") {
      val >> meta.overlap;
    } else if (key == "seed") {
      val >> meta.seed;
    }
  }
  if (!have_gt) throw std::runtime_error("missing gt in " + path);
  meta.gt.validate();
  return meta;
}

}  // namespace crossreg::io

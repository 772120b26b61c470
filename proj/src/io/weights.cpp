#include "crossreg/io/weights.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "weight container assumes a little-endian host");

namespace crossreg::io {

namespace {

void put_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t get_u32(std::ifstream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw std::runtime_error("truncated weight file");
  return v;
}

}  // namespace

void write_weight_file(const std::string& path, const WeightFile& file) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open weight file for writing: " + path);
  out.write(file.magic.data(), 4);
  put_u32(out, file.version);
  put_u32(out, static_cast<std::uint32_t>(file.dims.size()));
  for (std::uint32_t d : file.dims) put_u32(out, d);
  put_u32(out, static_cast<std::uint32_t>(file.matrices.size()));
  for (const MatX& m : file.matrices) {
    put_u32(out, static_cast<std::uint32_t>(m.rows()));
    put_u32(out, static_cast<std::uint32_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        const float f = static_cast<float>(m(r, c));
        out.write(reinterpret_cast<const char*>(&f), sizeof(f));
      }
    }
  }
  if (!out) throw std::runtime_error("error writing weight file: " + path);
}

WeightFile read_weight_file(const std::string& path,
                            const std::array<char, 4>& expected_magic) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open weight file: " + path);
  WeightFile file;
  in.read(file.magic.data(), 4);
  if (!in || std::memcmp(file.magic.data(), expected_magic.data(), 4) != 0) {
    throw std::runtime_error("bad weight file magic in " + path);
  }
  file.version = get_u32(in);
  if (file.version != 1) throw std::runtime_error("unsupported weight file version");
  file.dims.resize(get_u32(in));
  for (auto& d : file.dims) d = get_u32(in);
  file.matrices.resize(get_u32(in));
  for (MatX& m : file.matrices) {
    const std::uint32_t rows = get_u32(in);
    const std::uint32_t cols = get_u32(in);
    if (static_cast<std::uint64_t>(rows) * cols > (1u << 28)) {
      throw std::runtime_error("weight matrix too large in " + path);
    }
    m.resize(rows, cols);
    for (std::uint32_t r = 0; r < rows; ++r) {
      for (std::uint32_t c = 0; c < cols; ++c) {
        float f = 0.0f;
        in.read(reinterpret_cast<char*>(&f), sizeof(f));
        if (!in) throw std::runtime_error("truncated weight file: " + path);
        m(r, c) = static_cast<double>(f);
      }
    }
  }
  return file;
}

}  // namespace crossreg::io

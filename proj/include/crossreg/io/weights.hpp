#pragma once

#include "crossreg/core/types.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace crossreg::io {

/// Little-endian binary container: 4-byte magic, u32 version, u32 dim count,
/// dims, u32 matrix count, then per matrix u32 rows, u32 cols and row-major
/// f32 data in declared order.
struct WeightFile {
  std::array<char, 4> magic{};
  std::uint32_t version = 1;
  std::vector<std::uint32_t> dims;
  std::vector<MatX> matrices;
};

void write_weight_file(const std::string& path, const WeightFile& file);

/// Throws std::runtime_error on I/O failure or magic/shape mismatch.
WeightFile read_weight_file(const std::string& path, const std::array<char, 4>& expected_magic);

}  // namespace crossreg::io

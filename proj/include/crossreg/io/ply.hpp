#pragma once

#include "crossreg/core/types.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>

namespace crossreg::io {

struct PlyParseError : std::runtime_error {
  PlyParseError(const std::string& file, std::size_t byte_offset, const std::string& what)
      : std::runtime_error(file + " (byte " + std::to_string(byte_offset) + "): " + what),
        byte_offset(byte_offset) {}
  std::size_t byte_offset;
};

/// ASCII PLY, properties x y z (float semantics, 9 significant digits).
/// write -> read -> write round-trips byte-identically.
void write_ply(const std::string& path, const PointCloud& c);

PointCloud read_ply(const std::string& path);

}  // namespace crossreg::io

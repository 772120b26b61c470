#pragma once

#include "crossreg/core/types.hpp"

#include <cstdint>
#include <string>

namespace crossreg::io {

struct PairMeta {
  RigidTransform gt;
  double overlap = 0.0;
  std::uint64_t seed = 0;
};

/// key = value lines; gt serialized as 12 whitespace-separated numbers
/// (row-major rotation, then translation).
void write_meta(const std::string& path, const PairMeta& meta);

/// Re-validates the rotation on load (orthonormality within 1e-9).
PairMeta read_meta(const std::string& path);

}  // namespace crossreg::io

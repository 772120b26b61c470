#pragma once

#include "crossreg/sim/image.hpp"

#include <string>

namespace crossreg::io {

/// Plain "P2" grayscale PGM, maxval 65535, values scaled linearly from [0, 1].
void write_pgm(const std::string& path, const sim::ViewImage& img);

sim::ViewImage read_pgm(const std::string& path);

}  // namespace crossreg::io

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "visionts/grid.hpp"

namespace visionts {

/// Binary greymap: "P5\n<width> <height>\n255\n" followed by width*height
/// bytes, row-major, top row first. Pixels map linearly from the image's
/// [min, max] to [0, 255] with round-to-nearest; a constant image is
/// written as mid-grey (128).
std::vector<std::uint8_t> encode_pgm(const Grid<float>& image);
void write_pgm(const std::string& path, const Grid<float>& image);

}  // namespace visionts

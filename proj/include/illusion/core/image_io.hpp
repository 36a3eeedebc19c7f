#pragma once

#include <string>

#include "illusion/core/image.hpp"

namespace illusion {

// 8-bit sRGB PNG. Values are clamped to [0,1] and rounded to 255 levels.
void write_png(const std::string& path, const Image& img);

// Reads a PNG or JPEG file (sniffed by magic bytes) into [0,1] RGB.
// Grayscale and alpha inputs are expanded / composited onto black.
Image read_image(const std::string& path);

}  // namespace illusion

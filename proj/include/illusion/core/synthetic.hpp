#pragma once

#include <cstdint>

#include "illusion/core/image.hpp"

namespace illusion {

// Multi-octave value noise mapped into [lo, hi]; deterministic in the seed.
// Handy as an offline stand-in for photographic content.
Image smooth_random_image(int h, int w, uint64_t seed, int octaves = 3, double lo = 0.1, double hi = 0.9);

// Horizontal-vertical color gradient.
Image gradient_image(int h, int w);

}  // namespace illusion

#pragma once

#include <span>

#include "illusion/arrange/arrangements.hpp"
#include "illusion/core/image.hpp"
#include "illusion/core/rng.hpp"
#include "illusion/guidance/backend.hpp"

namespace illusion::targets {

// The per-derived dream targets z_j. Image-kind targets are pinned for the
// whole run; text-kind targets are regenerated on every refresh.
struct DreamTargetState {
    std::vector<Image> current;
    double strength = 0.0;
    int refresh_count = 0;
};

// For text targets z_j <- img2img(prompt_j, d_j, strength); image targets
// stay bitwise identical. strength must lie in (0, 1].
DreamTargetState refresh_targets(DreamTargetState state, const guidance::GuidanceBackend& backend,
                                 const arrange::IllusionSpec& spec, std::span<const Image> derived,
                                 double strength, RngStream& rng, int reverse_steps = 50);

// Loads a PNG/JPEG target and resamples it to the working resolution.
// `automatic` uses nearest-neighbor when the file looks near-binary
// (at most 8 distinct 8-bit values, e.g. a QR code) and bilinear otherwise.
Image load_image_target(const std::string& path, int height, int width,
                        arrange::TargetSpec::Resample mode = arrange::TargetSpec::Resample::automatic);

// Distinct 8-bit sample values after quantization; drives the automatic
// resampling choice.
int unique_byte_values(const Image& img);

}  // namespace illusion::targets

#include "illusion/targets/targets.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "illusion/core/errors.hpp"
#include "illusion/core/image_io.hpp"

namespace illusion::targets {

DreamTargetState refresh_targets(DreamTargetState state, const guidance::GuidanceBackend& backend,
                                 const arrange::IllusionSpec& spec, std::span<const Image> derived,
                                 double strength, RngStream& rng, int reverse_steps) {
    if (static_cast<int>(derived.size()) != spec.m) {
        throw ConfigError("refresh_targets: expected " + std::to_string(spec.m) + " derived images");
    }
    if (!(strength > 0.0 && strength <= 1.0)) {
        throw ConfigError("refresh_targets: strength must lie in (0,1]");
    }
    state.current.resize(spec.m);
    for (int j = 0; j < spec.m; ++j) {
        const auto& target = spec.targets[j];
        if (target.kind == arrange::TargetSpec::Kind::image) {
            state.current[j] = target.image;  // predefined targets are never replaced
        } else {
            state.current[j] = guidance::img2img(backend, target.prompt, derived[j], strength, rng,
                                                 reverse_steps);
        }
    }
    state.strength = strength;
    state.refresh_count += 1;
    return state;
}

int unique_byte_values(const Image& img) {
    std::array<bool, 256> seen{};
    int count = 0;
    for (double v : img.samples()) {
        int byte = static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
        if (!seen[byte]) {
            seen[byte] = true;
            ++count;
        }
    }
    return count;
}

Image load_image_target(const std::string& path, int height, int width,
                        arrange::TargetSpec::Resample mode) {
    Image img = read_image(path);
    if (img.height() == height && img.width() == width) return img;
    using Resample = arrange::TargetSpec::Resample;
    Resample effective = mode;
    if (mode == Resample::automatic) {
        effective = unique_byte_values(img) <= 8 ? Resample::nearest : Resample::bilinear;
    }
    if (effective == Resample::nearest) return resample_nearest(img, height, width);
    return resample_bilinear(img, height, width);
}

}  // namespace illusion::targets

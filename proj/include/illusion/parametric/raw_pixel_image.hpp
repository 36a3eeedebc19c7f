#pragma once

#include <cstdint>

#include "illusion/parametric/parametric_image.hpp"

namespace illusion::parametric {

// Direct pixel-space parameterization. Stored values are logits; rendering
// applies a sigmoid so outputs stay in (0,1) and gradients never die at the
// range boundary.
class RawPixelImage : public ParametricImage {
public:
    RawPixelImage(int height, int width, uint64_t seed, double init_std = 0.05);

    // Logits chosen so that render() reproduces `img` (clamped away from 0/1).
    static std::unique_ptr<RawPixelImage> from_image(const Image& img);

    std::string kind() const override { return "pixels"; }
    int height() const override { return h_; }
    int width() const override { return w_; }

    Image render() const override;

    size_t parameter_count() const override { return logits_.size(); }
    std::vector<TensorInfo> parameter_tensors() const override;
    void get_parameters(std::span<double> out) const override;
    void set_parameters(std::span<const double> in) override;
    void accumulate_param_grad(const Image& pixel_grad, std::span<double> grad) const override;

    void save(BinaryWriter& w, const std::string& prefix) const override;
    static std::unique_ptr<RawPixelImage> load(BinaryReader& r, const std::string& prefix);
    std::unique_ptr<ParametricImage> clone() const override;

private:
    RawPixelImage() = default;
    int h_ = 0, w_ = 0;
    std::vector<double> logits_;  // h*w*3
};

}  // namespace illusion::parametric

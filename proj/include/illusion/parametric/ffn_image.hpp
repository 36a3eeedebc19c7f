#pragma once

#include <cstdint>

#include "illusion/kernels/mlp_kernels.hpp"
#include "illusion/parametric/parametric_image.hpp"

namespace illusion::parametric {

struct FfnConfig {
    int num_features = 256;
    double frequency_scale = 10.0;       // stddev of frequencies, cycles per unit square
    std::vector<int> hidden_widths = {256, 256};

    void validate() const;
};

// Implicit image: fixed Gaussian Fourier features feeding a small MLP from
// unit-square coordinates to RGB. The frequency matrix is drawn once from
// the seed and never trained.
class FourierFeatureImage : public ParametricImage {
public:
    FourierFeatureImage(int height, int width, uint64_t seed, FfnConfig config = {});

    std::string kind() const override { return "ffn"; }
    int height() const override { return h_; }
    int width() const override { return w_; }
    uint64_t seed() const { return seed_; }
    const FfnConfig& config() const { return cfg_; }
    std::span<const double> frequency_matrix() const { return freq_; }

    Image render() const override;
    // Evaluates arbitrary points on the unit square; xy is [count][2].
    std::vector<double> render_points(std::span<const double> xy) const;
    // Renders the cell-center grid of another resolution.
    Image render_at_resolution(int height, int width) const;

    size_t parameter_count() const override { return params_.size(); }
    std::vector<TensorInfo> parameter_tensors() const override;
    void get_parameters(std::span<double> out) const override;
    void set_parameters(std::span<const double> in) override;
    void accumulate_param_grad(const Image& pixel_grad, std::span<double> grad) const override;

    void save(BinaryWriter& w, const std::string& prefix) const override;
    static std::unique_ptr<FourierFeatureImage> load(BinaryReader& r, const std::string& prefix);
    std::unique_ptr<ParametricImage> clone() const override;

private:
    kernels::FfnView view() const;

    int h_ = 0, w_ = 0;
    uint64_t seed_ = 0;
    FfnConfig cfg_;
    std::vector<int> dims_;
    std::vector<double> freq_;    // num_features x 2, fixed
    std::vector<double> params_;  // [W0, b0, W1, b1, ...]
};

// Config-checked constructor used by the CLI and tests.
std::unique_ptr<FourierFeatureImage> create_ffn(int height, int width, uint64_t seed, const FfnConfig& config = {});

}  // namespace illusion::parametric

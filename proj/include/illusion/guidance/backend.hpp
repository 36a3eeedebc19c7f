#pragma once

#include <string>
#include <vector>

#include "illusion/core/image.hpp"
#include "illusion/core/rng.hpp"

namespace illusion::guidance {

// Forward-process schedule: alpha_bar(tau) for tau in [0, timesteps],
// alpha_bar(0) = 1 (no noise).
struct NoiseSchedule {
    int timesteps = 0;
    std::vector<double> alpha_bar;  // size timesteps + 1

    static NoiseSchedule linear_beta(int timesteps = 1000, double beta_start = 1e-4, double beta_end = 0.02);

    double sqrt_ab(int tau) const;
    double sqrt_one_minus_ab(int tau) const;
};

// x_tau = sqrt(alpha_bar) * x + sqrt(1 - alpha_bar) * eps.
Image add_noise(const NoiseSchedule& sched, const Image& x, int tau, const Image& eps);

// Frozen text-to-image model surface: encoder/decoder pair, text embedding
// and the noise predictor. Implementations must be stateless with respect to
// optimization; nothing here is ever trained.
class GuidanceBackend {
public:
    virtual ~GuidanceBackend() = default;

    virtual Image encode(const Image& image) const = 0;
    virtual Image decode(const Image& latent) const = 0;
    virtual std::vector<double> embed_text(const std::string& prompt) const = 0;
    virtual Image predict_noise(const Image& noised_latent, int tau,
                                const std::vector<double>& embedding) const = 0;
    virtual int max_timestep() const = 0;
    virtual const NoiseSchedule& schedule() const = 0;

    // Maps a latent-space gradient back to image space (the encoder
    // vector-Jacobian product). Identity-shaped encoders may keep the default.
    virtual Image encode_vjp(const Image& image, const Image& latent_grad) const {
        (void)image;
        return latent_grad;
    }
};

// SDEdit-style conditional refresh: noises the input to
// floor(strength * max_timestep) and runs the backend's deterministic
// reverse process conditioned on the prompt. strength = 0 returns the input
// unchanged.
Image img2img(const GuidanceBackend& backend, const std::string& prompt, const Image& image,
              double strength, RngStream& rng, int reverse_steps = 50);

}  // namespace illusion::guidance

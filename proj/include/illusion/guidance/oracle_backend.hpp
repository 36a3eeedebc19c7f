#pragma once

#include <utility>

#include "illusion/guidance/backend.hpp"

namespace illusion::guidance {

// Closed-form single-image denoiser used for deterministic offline runs and
// verification. encode/decode are identity and the noise prediction inverts
// the forward process exactly for the registered target:
//   predict_noise(x, tau, .) = (x - sqrt(ab) * target) / sqrt(1 - ab).
// Prompts registered up front select per-prompt targets; unknown prompts fall
// back to the default target.
class AnalyticOracleBackend : public GuidanceBackend {
public:
    AnalyticOracleBackend(Image default_target, NoiseSchedule sched = NoiseSchedule::linear_beta());

    // Registration happens at construction time; the backend is frozen after.
    void register_target(const std::string& prompt, Image target);

    Image encode(const Image& image) const override { return image; }
    Image decode(const Image& latent) const override { return latent; }
    std::vector<double> embed_text(const std::string& prompt) const override;
    Image predict_noise(const Image& noised_latent, int tau,
                        const std::vector<double>& embedding) const override;
    int max_timestep() const override { return sched_.timesteps; }
    const NoiseSchedule& schedule() const override { return sched_; }

    const Image& target_for_embedding(const std::vector<double>& embedding) const;
    const Image& default_target() const { return default_target_; }

private:
    Image default_target_;
    std::vector<std::pair<std::string, Image>> named_targets_;
    NoiseSchedule sched_;
};

}  // namespace illusion::guidance

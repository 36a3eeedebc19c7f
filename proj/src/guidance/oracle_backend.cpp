#include "illusion/guidance/oracle_backend.hpp"

#include <cmath>

#include "illusion/core/errors.hpp"
#include "illusion/core/parallel.hpp"

namespace illusion::guidance {

AnalyticOracleBackend::AnalyticOracleBackend(Image default_target, NoiseSchedule sched)
    : default_target_(std::move(default_target)), sched_(std::move(sched)) {
    if (default_target_.empty()) throw ConfigError("oracle backend needs a non-empty target image");
}

void AnalyticOracleBackend::register_target(const std::string& prompt, Image target) {
    if (!target.same_shape(default_target_)) {
        throw ConfigError("oracle target resolution must match the default target");
    }
    named_targets_.emplace_back(prompt, std::move(target));
}

std::vector<double> AnalyticOracleBackend::embed_text(const std::string& prompt) const {
    for (size_t i = 0; i < named_targets_.size(); ++i) {
        if (named_targets_[i].first == prompt) return {static_cast<double>(i)};
    }
    return {-1.0};
}

const Image& AnalyticOracleBackend::target_for_embedding(const std::vector<double>& embedding) const {
    if (embedding.size() == 1 && embedding[0] >= 0.0) {
        size_t idx = static_cast<size_t>(embedding[0]);
        if (idx < named_targets_.size()) return named_targets_[idx].second;
    }
    return default_target_;
}

Image AnalyticOracleBackend::predict_noise(const Image& noised_latent, int tau,
                                           const std::vector<double>& embedding) const {
    if (tau < 1 || tau > sched_.timesteps) {
        throw ConfigError("predict_noise: timestep " + std::to_string(tau) + " outside [1," +
                          std::to_string(sched_.timesteps) + "]");
    }
    const Image& target = target_for_embedding(embedding);
    if (!noised_latent.same_shape(target)) {
        throw BackendError("oracle backend: latent resolution differs from the target image");
    }
    const double sa = sched_.sqrt_ab(tau);
    const double inv_sna = 1.0 / sched_.sqrt_one_minus_ab(tau);
    Image out(noised_latent.height(), noised_latent.width());
    const double* xd = noised_latent.data();
    const double* td = target.data();
    double* od = out.data();
    par::for_n(static_cast<int64_t>(out.sample_count()),
               [&](int64_t i) { od[i] = (xd[i] - sa * td[i]) * inv_sna; });
    return out;
}

}  // namespace illusion::guidance

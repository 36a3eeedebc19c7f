#include "illusion/loss/losses.hpp"

#include <cmath>

#include "illusion/core/errors.hpp"
#include "illusion/core/parallel.hpp"
#include "illusion/loss/ssim.hpp"

namespace illusion::loss {

SdWeighting sd_weighting_from_string(const std::string& s) {
    if (s == "constant") return SdWeighting::constant;
    if (s == "sqrt_one_minus_alpha_bar") return SdWeighting::sqrt_one_minus_alpha_bar;
    throw ConfigError("unknown sd_weighting: " + s);
}

std::string to_string(SdWeighting w) {
    return w == SdWeighting::constant ? "constant" : "sqrt_one_minus_alpha_bar";
}

namespace {

void require_finite(const Image& img, const std::string& what) {
    for (double v : img.samples()) {
        if (!std::isfinite(v)) throw NumericError("non-finite values in " + what);
    }
}

}  // namespace

SdGradResult score_distillation_grad(const guidance::GuidanceBackend& backend, const std::string& prompt,
                                     const Image& d, RngStream& rng, SdWeighting weighting) {
    const auto& sched = backend.schedule();
    const int tau = static_cast<int>(rng.uniform_int(1, backend.max_timestep()));

    Image latent = backend.encode(d);
    Image eps(latent.height(), latent.width());
    for (double& v : eps.samples()) v = rng.normal();

    Image noised = guidance::add_noise(sched, latent, tau, eps);
    const auto embedding = backend.embed_text(prompt);
    // frozen model: the prediction is a constant for the backward pass
    Image eta_hat = backend.predict_noise(noised, tau, embedding);

    const double w = weighting == SdWeighting::constant ? 1.0 : sched.sqrt_one_minus_ab(tau);

    Image latent_grad(latent.height(), latent.width());
    {
        const double* ph = eta_hat.data();
        const double* pe = eps.data();
        double* pg = latent_grad.data();
        par::for_n(static_cast<int64_t>(latent_grad.sample_count()),
                   [&](int64_t i) { pg[i] = w * (ph[i] - pe[i]); });
    }
    const double loss = par::block_sum(static_cast<int64_t>(eps.sample_count()),
                                       [&](int64_t i) {
                                           return std::abs(eps.data()[i] - eta_hat.data()[i]);
                                       }) /
                        static_cast<double>(eps.sample_count());

    SdGradResult res{backend.encode_vjp(d, latent_grad), loss, tau};
    if (!std::isfinite(res.loss)) throw NumericError("score distillation loss is not finite");
    require_finite(res.grad, "score distillation gradient");
    return res;
}

double mse(const Image& a, const Image& b) {
    if (!a.same_shape(b)) throw ConfigError("mse: image shapes differ");
    const double* pa = a.data();
    const double* pb = b.data();
    const int64_t n = static_cast<int64_t>(a.sample_count());
    double sum = par::block_sum(n, [&](int64_t i) {
        double diff = pa[i] - pb[i];
        return diff * diff;
    });
    return sum / static_cast<double>(n);
}

void mse_backward(const Image& a, const Image& b, double upstream, Image& grad) {
    if (!a.same_shape(b) || !grad.same_shape(b)) throw ConfigError("mse_backward: shape mismatch");
    const int64_t n = static_cast<int64_t>(a.sample_count());
    const double scale = 2.0 * upstream / static_cast<double>(n);
    const double* pa = a.data();
    const double* pb = b.data();
    double* pg = grad.data();
    par::for_n(n, [&](int64_t i) { pg[i] += scale * (pb[i] - pa[i]); });
}

double image_similarity(const Image& a, const Image& b) { return ssim(a, b) - mse(a, b); }

double dream_target_loss(const Image& z, const Image& d) { return (1.0 - ssim(z, d)) + mse(z, d); }

void dream_target_loss_backward(const Image& z, const Image& d, double upstream, Image& grad) {
    ssim_backward(z, d, -upstream, grad);
    mse_backward(z, d, upstream, grad);
}

double total_weighted_loss(std::span<const double> per_derived, std::span<const double> weights) {
    if (per_derived.size() != weights.size()) {
        throw ConfigError("total_weighted_loss: per-derived and weight counts differ");
    }
    double total = 0.0;
    for (size_t i = 0; i < per_derived.size(); ++i) {
        if (!(weights[i] > 0)) throw ConfigError("total_weighted_loss: weights must be > 0");
        total += per_derived[i] * weights[i];
    }
    return total;
}

}  // namespace illusion::loss

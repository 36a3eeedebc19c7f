#pragma once

#include <span>
#include <string>

#include "illusion/core/image.hpp"
#include "illusion/core/rng.hpp"
#include "illusion/guidance/backend.hpp"

namespace illusion::loss {

// Timestep normalization applied to the score-distillation gradient.
enum class SdWeighting { constant, sqrt_one_minus_alpha_bar };

SdWeighting sd_weighting_from_string(const std::string& s);
std::string to_string(SdWeighting w);

struct SdGradResult {
    Image grad;   // dL/dd, image space
    double loss;  // mean |eta - eta_hat|
    int tau;
};

// Samples a timestep uniformly, noises the encoded image, queries the frozen
// noise predictor and returns the score-distillation gradient on the derived
// image. The predictor output is treated as a constant: no gradient flows
// into the backend. NaN/Inf anywhere raises NumericError.
SdGradResult score_distillation_grad(const guidance::GuidanceBackend& backend, const std::string& prompt,
                                     const Image& d, RngStream& rng,
                                     SdWeighting weighting = SdWeighting::constant);

// Mean squared error over all samples (resolution independent).
double mse(const Image& a, const Image& b);
void mse_backward(const Image& a, const Image& b, double upstream, Image& grad);  // d/d b

// SSIM(a,b) - MSE(a,b); 1 exactly iff a == b.
double image_similarity(const Image& a, const Image& b);

// (1 - SSIM(z,d)) + MSE(z,d); 0 iff z == d. Equals 1 - image_similarity.
double dream_target_loss(const Image& z, const Image& d);
void dream_target_loss_backward(const Image& z, const Image& d, double upstream, Image& grad);  // d/d d

double total_weighted_loss(std::span<const double> per_derived, std::span<const double> weights);

}  // namespace illusion::loss

#pragma once

#include "illusion/core/image.hpp"

namespace illusion::loss {

// Structural similarity, Gaussian-weighted (sigma 1.5, 11-tap window,
// K1=0.01, K2=0.03, unit data range), population covariance, computed per
// channel and averaged. Local stats use reflect boundaries and the border of
// filter-radius width is excluded from the mean. For images smaller than the
// window the radius shrinks to fit.
double ssim(const Image& a, const Image& b);

// Accumulates upstream * d ssim(a, b) / d b into grad.
void ssim_backward(const Image& a, const Image& b, double upstream, Image& grad);

// Reference path built on the direct 2D convolution kernels; used by tests.
double ssim_reference(const Image& a, const Image& b);

}  // namespace illusion::loss

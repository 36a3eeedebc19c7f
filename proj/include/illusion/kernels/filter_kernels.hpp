#pragma once

#include <vector>

namespace illusion::kernels {

struct GaussianKernel {
    int radius = 0;
    std::vector<double> taps;  // 2*radius+1, normalized to sum 1

    static GaussianKernel make(double sigma, int radius);
};

// Boundary handling matches ndimage 'reflect': (d c b a | a b c d).
int reflect_index(int t, int n);

// Separable Gaussian filter of an h x w plane (rows then columns).
// tmp must hold h*w doubles.
void gauss_filter_plane(const double* in, int h, int w, const GaussianKernel& k, double* out, double* tmp);

// Adjoint of gauss_filter_plane (transpose of the linear map, including the
// reflect boundary). Used by the SSIM backward pass.
void gauss_filter_plane_adjoint(const double* g, int h, int w, const GaussianKernel& k, double* out, double* tmp);

namespace serial {
// Direct (non-separable) 2D convolution reference.
void gauss_filter_plane(const double* in, int h, int w, const GaussianKernel& k, double* out);
void gauss_filter_plane_adjoint(const double* g, int h, int w, const GaussianKernel& k, double* out);
}  // namespace serial

}  // namespace illusion::kernels

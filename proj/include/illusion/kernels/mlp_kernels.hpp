#pragma once

#include <cstdint>
#include <vector>

namespace illusion::kernels {

// Non-owning view of a Fourier-feature MLP.
// dims[0] must equal 2 * num_features; dims.back() is the output width (3).
// weights[l] is row-major [dims[l+1] x dims[l]], biases[l] is [dims[l+1]].
// Hidden activations use SiLU; the output is squashed with (tanh+1)/2.
struct FfnView {
    const double* freq = nullptr;  // [num_features][2], cycles per unit square
    int num_features = 0;
    std::vector<int> dims;
    std::vector<const double*> weights;
    std::vector<const double*> biases;

    int layer_count() const { return static_cast<int>(dims.size()) - 1; }
    int max_width() const;
};

// Flattened trainable-parameter size, layout [W0, b0, W1, b1, ...].
// The frequency matrix is not a parameter.
size_t ffn_param_count(const FfnView& v);

// Renders the (h, w) cell-center grid into out[h*w*3], values in [0, 1].
void ffn_render(const FfnView& v, int h, int w, double* out);

// Evaluates arbitrary unit-square points xy[count][2] into out[count*3].
void ffn_render_points(const FfnView& v, const double* xy, int64_t count, double* out);

// Accumulates dL/dparams into grad given dL/dpixels of the grid render.
// Deterministic for any thread count: fixed-block partials combined in order.
void ffn_param_grad(const FfnView& v, int h, int w, const double* pixel_grad, double* grad);

namespace serial {
// Plain-loop reference implementations kept for parity tests and benchmarks.
void ffn_render(const FfnView& v, int h, int w, double* out);
void ffn_param_grad(const FfnView& v, int h, int w, const double* pixel_grad, double* grad);
}  // namespace serial

}  // namespace illusion::kernels

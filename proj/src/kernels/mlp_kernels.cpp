#include "illusion/kernels/mlp_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

#include "illusion/core/parallel.hpp"

namespace illusion::kernels {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double silu(double x) { return x * sigmoid(x); }
inline double silu_prime(double x) {
    double s = sigmoid(x);
    return s * (1.0 + x * (1.0 - s));
}

// Per-point workspace: pre-activations z[l] and activations a[l] per layer,
// plus the feature vector a[-1].
struct Scratch {
    std::vector<double> features;            // dims[0]
    std::vector<std::vector<double>> z;      // z[l]: dims[l+1]
    std::vector<std::vector<double>> a;      // a[l]: dims[l+1] (post activation / squash input kept in z)
    std::vector<double> dz, da;              // max width

    explicit Scratch(const FfnView& v) {
        features.resize(v.dims[0]);
        int L = v.layer_count();
        z.resize(L);
        a.resize(L);
        for (int l = 0; l < L; ++l) {
            z[l].resize(v.dims[l + 1]);
            a[l].resize(v.dims[l + 1]);
        }
        dz.resize(v.max_width());
        da.resize(v.max_width());
    }
};

inline void compute_features(const FfnView& v, double x, double y, double* feat) {
    const int F = v.num_features;
    for (int f = 0; f < F; ++f) {
        double phase = kTwoPi * (v.freq[2 * f] * x + v.freq[2 * f + 1] * y);
        feat[f] = std::cos(phase);
        feat[F + f] = std::sin(phase);
    }
}

inline void forward_point(const FfnView& v, double x, double y, Scratch& s) {
    compute_features(v, x, y, s.features.data());
    const int L = v.layer_count();
    const double* in = s.features.data();
    for (int l = 0; l < L; ++l) {
        const int nin = v.dims[l], nout = v.dims[l + 1];
        const double* W = v.weights[l];
        const double* b = v.biases[l];
        for (int o = 0; o < nout; ++o) {
            double acc = b[o];
            const double* row = W + static_cast<size_t>(o) * nin;
            for (int i = 0; i < nin; ++i) acc += row[i] * in[i];
            s.z[l][o] = acc;
            s.a[l][o] = (l + 1 < L) ? silu(acc) : acc;
        }
        in = s.a[l].data();
    }
}

inline void squash_output(const Scratch& s, int L, double* out3) {
    const auto& zo = s.z[L - 1];
    for (int c = 0; c < 3; ++c) out3[c] = 0.5 * (std::tanh(zo[c]) + 1.0);
}

std::vector<size_t> layer_offsets(const FfnView& v) {
    const int L = v.layer_count();
    std::vector<size_t> offset(L);
    size_t off = 0;
    for (int l = 0; l < L; ++l) {
        offset[l] = off;
        off += static_cast<size_t>(v.dims[l + 1]) * v.dims[l] + v.dims[l + 1];
    }
    return offset;
}

// Backward for one point; accumulates into grad (layout [W0,b0,W1,b1,...]).
inline void backward_point(const FfnView& v, Scratch& s, const std::vector<size_t>& offset,
                           const double* gpix, double* grad) {
    const int L = v.layer_count();
    // through the output squash: p = (tanh(z)+1)/2, dp/dz = (1 - tanh^2)/2
    for (int c = 0; c < 3; ++c) {
        double t = std::tanh(s.z[L - 1][c]);
        s.dz[c] = gpix[c] * 0.5 * (1.0 - t * t);
    }
    for (int l = L - 1; l >= 0; --l) {
        const int nin = v.dims[l], nout = v.dims[l + 1];
        const double* in = (l == 0) ? s.features.data() : s.a[l - 1].data();
        double* gW = grad + offset[l];
        double* gb = gW + static_cast<size_t>(nout) * nin;
        for (int o = 0; o < nout; ++o) {
            double d = s.dz[o];
            double* grow = gW + static_cast<size_t>(o) * nin;
            for (int i = 0; i < nin; ++i) grow[i] += d * in[i];
            gb[o] += d;
        }
        if (l == 0) break;
        const double* W = v.weights[l];
        for (int i = 0; i < nin; ++i) s.da[i] = 0.0;
        for (int o = 0; o < nout; ++o) {
            double d = s.dz[o];
            const double* row = W + static_cast<size_t>(o) * nin;
            for (int i = 0; i < nin; ++i) s.da[i] += row[i] * d;
        }
        for (int i = 0; i < nin; ++i) s.dz[i] = s.da[i] * silu_prime(s.z[l - 1][i]);
    }
}

}  // namespace

int FfnView::max_width() const {
    int m = 0;
    for (int d : dims) m = std::max(m, d);
    return m;
}

size_t ffn_param_count(const FfnView& v) {
    size_t n = 0;
    for (int l = 0; l + 1 < static_cast<int>(v.dims.size()); ++l) {
        n += static_cast<size_t>(v.dims[l + 1]) * v.dims[l] + v.dims[l + 1];
    }
    return n;
}

void ffn_render(const FfnView& v, int h, int w, double* out) {
    const int64_t npix = static_cast<int64_t>(h) * w;
    const int L = v.layer_count();
#ifdef _OPENMP
#pragma omp parallel
#endif
    {
        Scratch s(v);
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
        for (int64_t p = 0; p < npix; ++p) {
            int row = static_cast<int>(p / w), col = static_cast<int>(p % w);
            double x = (col + 0.5) / w, y = (row + 0.5) / h;
            forward_point(v, x, y, s);
            squash_output(s, L, out + p * 3);
        }
    }
}

void ffn_render_points(const FfnView& v, const double* xy, int64_t count, double* out) {
    const int L = v.layer_count();
#ifdef _OPENMP
#pragma omp parallel
#endif
    {
        Scratch s(v);
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
        for (int64_t p = 0; p < count; ++p) {
            forward_point(v, xy[2 * p], xy[2 * p + 1], s);
            squash_output(s, L, out + p * 3);
        }
    }
}

void ffn_param_grad(const FfnView& v, int h, int w, const double* pixel_grad, double* grad) {
    const int64_t npix = static_cast<int64_t>(h) * w;
    const size_t nparam = ffn_param_count(v);
    const int nblocks = par::kReduceBlocks;
    const auto offsets = layer_offsets(v);
    std::vector<double> partials(static_cast<size_t>(nblocks) * nparam, 0.0);
#ifdef _OPENMP
#pragma omp parallel
#endif
    {
        Scratch s(v);
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
        for (int b = 0; b < nblocks; ++b) {
            auto [lo, hi] = par::block_range(npix, b, nblocks);
            double* g = partials.data() + static_cast<size_t>(b) * nparam;
            for (int64_t p = lo; p < hi; ++p) {
                int row = static_cast<int>(p / w), col = static_cast<int>(p % w);
                double x = (col + 0.5) / w, y = (row + 0.5) / h;
                forward_point(v, x, y, s);
                backward_point(v, s, offsets, pixel_grad + p * 3, g);
            }
        }
    }
    for (int b = 0; b < nblocks; ++b) {
        const double* g = partials.data() + static_cast<size_t>(b) * nparam;
        for (size_t i = 0; i < nparam; ++i) grad[i] += g[i];
    }
}

namespace serial {

void ffn_render(const FfnView& v, int h, int w, double* out) {
    Scratch s(v);
    const int L = v.layer_count();
    for (int row = 0; row < h; ++row) {
        for (int col = 0; col < w; ++col) {
            double x = (col + 0.5) / w, y = (row + 0.5) / h;
            forward_point(v, x, y, s);
            squash_output(s, L, out + (static_cast<int64_t>(row) * w + col) * 3);
        }
    }
}

void ffn_param_grad(const FfnView& v, int h, int w, const double* pixel_grad, double* grad) {
    Scratch s(v);
    const auto offsets = layer_offsets(v);
    for (int row = 0; row < h; ++row) {
        for (int col = 0; col < w; ++col) {
            double x = (col + 0.5) / w, y = (row + 0.5) / h;
            forward_point(v, x, y, s);
            backward_point(v, s, offsets, pixel_grad + (static_cast<int64_t>(row) * w + col) * 3, grad);
        }
    }
}

}  // namespace serial

}  // namespace illusion::kernels

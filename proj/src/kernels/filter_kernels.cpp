#include "illusion/kernels/filter_kernels.hpp"

#include <cmath>
#include <cstring>

#include "illusion/core/parallel.hpp"

namespace illusion::kernels {

GaussianKernel GaussianKernel::make(double sigma, int radius) {
    GaussianKernel k;
    k.radius = radius;
    k.taps.resize(2 * radius + 1);
    double sum = 0.0;
    for (int t = -radius; t <= radius; ++t) {
        double v = std::exp(-0.5 * (t * t) / (sigma * sigma));
        k.taps[t + radius] = v;
        sum += v;
    }
    for (double& v : k.taps) v /= sum;
    return k;
}

int reflect_index(int t, int n) {
    if (n == 1) return 0;
    while (t < 0 || t >= n) {
        if (t < 0) t = -t - 1;
        if (t >= n) t = 2 * n - 1 - t;
    }
    return t;
}

void gauss_filter_plane(const double* in, int h, int w, const GaussianKernel& k, double* out, double* tmp) {
    const int r = k.radius;
    const double* taps = k.taps.data();
    // rows
    par::for_n(h, [&](int64_t y) {
        const double* row = in + y * w;
        double* trow = tmp + y * w;
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int t = -r; t <= r; ++t) acc += taps[t + r] * row[reflect_index(x + t, w)];
            trow[x] = acc;
        }
    });
    // columns
    par::for_n(w, [&](int64_t x) {
        for (int y = 0; y < h; ++y) {
            double acc = 0.0;
            for (int t = -r; t <= r; ++t) acc += taps[t + r] * tmp[static_cast<int64_t>(reflect_index(y + t, h)) * w + x];
            out[static_cast<int64_t>(y) * w + x] = acc;
        }
    });
}

void gauss_filter_plane_adjoint(const double* g, int h, int w, const GaussianKernel& k, double* out, double* tmp) {
    const int r = k.radius;
    const double* taps = k.taps.data();
    // forward was rows then columns; adjoint is column-adjoint then row-adjoint
    std::memset(tmp, 0, sizeof(double) * h * w);
    par::for_n(w, [&](int64_t x) {
        for (int y = 0; y < h; ++y) {
            double v = g[static_cast<int64_t>(y) * w + x];
            for (int t = -r; t <= r; ++t) {
                tmp[static_cast<int64_t>(reflect_index(y + t, h)) * w + x] += taps[t + r] * v;
            }
        }
    });
    std::memset(out, 0, sizeof(double) * h * w);
    par::for_n(h, [&](int64_t y) {
        const double* trow = tmp + y * w;
        double* orow = out + y * w;
        for (int x = 0; x < w; ++x) {
            double v = trow[x];
            for (int t = -r; t <= r; ++t) orow[reflect_index(x + t, w)] += taps[t + r] * v;
        }
    });
}

namespace serial {

void gauss_filter_plane(const double* in, int h, int w, const GaussianKernel& k, double* out) {
    const int r = k.radius;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int dy = -r; dy <= r; ++dy) {
                int sy = reflect_index(y + dy, h);
                for (int dx = -r; dx <= r; ++dx) {
                    int sx = reflect_index(x + dx, w);
                    acc += k.taps[dy + r] * k.taps[dx + r] * in[static_cast<int64_t>(sy) * w + sx];
                }
            }
            out[static_cast<int64_t>(y) * w + x] = acc;
        }
    }
}

void gauss_filter_plane_adjoint(const double* g, int h, int w, const GaussianKernel& k, double* out) {
    const int r = k.radius;
    std::memset(out, 0, sizeof(double) * h * w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double v = g[static_cast<int64_t>(y) * w + x];
            for (int dy = -r; dy <= r; ++dy) {
                int sy = reflect_index(y + dy, h);
                for (int dx = -r; dx <= r; ++dx) {
                    int sx = reflect_index(x + dx, w);
                    out[static_cast<int64_t>(sy) * w + sx] += k.taps[dy + r] * k.taps[dx + r] * v;
                }
            }
        }
    }
}

}  // namespace serial

}  // namespace illusion::kernels

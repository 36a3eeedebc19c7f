#include "illusion/loss/ssim.hpp"

#include <algorithm>
#include <vector>

#include "illusion/core/errors.hpp"
#include "illusion/core/parallel.hpp"
#include "illusion/kernels/filter_kernels.hpp"

namespace illusion::loss {

namespace {

constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;
constexpr double kSigma = 1.5;

int effective_radius(int h, int w) {
    // 11-tap window when it fits (ndimage radius for sigma 1.5, truncate 3.5)
    return std::max(0, std::min(5, (std::min(h, w) - 1) / 2));
}

void extract_plane(const Image& img, int c, double* plane) {
    const double* d = img.data();
    const int64_t n = static_cast<int64_t>(img.height()) * img.width();
    for (int64_t i = 0; i < n; ++i) plane[i] = d[i * 3 + c];
}

void check_shapes(const Image& a, const Image& b) {
    if (!a.same_shape(b)) throw ConfigError("ssim: image shapes differ");
    if (a.empty()) throw ConfigError("ssim: empty image");
}

struct PlaneStats {
    std::vector<double> ax, bx, ux, uy, uxx, uyy, uxy, tmp;
    void resize(int64_t n) {
        for (auto* v : {&ax, &bx, &ux, &uy, &uxx, &uyy, &uxy, &tmp}) v->resize(n);
    }
};

// Computes all filtered statistics for one channel.
void compute_stats(const Image& a, const Image& b, int c, const kernels::GaussianKernel& k, PlaneStats& s) {
    const int h = a.height(), w = a.width();
    const int64_t n = static_cast<int64_t>(h) * w;
    s.resize(n);
    extract_plane(a, c, s.ax.data());
    extract_plane(b, c, s.bx.data());
    std::vector<double> prod(n);
    kernels::gauss_filter_plane(s.ax.data(), h, w, k, s.ux.data(), s.tmp.data());
    kernels::gauss_filter_plane(s.bx.data(), h, w, k, s.uy.data(), s.tmp.data());
    for (int64_t i = 0; i < n; ++i) prod[i] = s.ax[i] * s.ax[i];
    kernels::gauss_filter_plane(prod.data(), h, w, k, s.uxx.data(), s.tmp.data());
    for (int64_t i = 0; i < n; ++i) prod[i] = s.bx[i] * s.bx[i];
    kernels::gauss_filter_plane(prod.data(), h, w, k, s.uyy.data(), s.tmp.data());
    for (int64_t i = 0; i < n; ++i) prod[i] = s.ax[i] * s.bx[i];
    kernels::gauss_filter_plane(prod.data(), h, w, k, s.uxy.data(), s.tmp.data());
}

double mean_ssim_of_stats(const PlaneStats& s, int h, int w, int pad) {
    double sum = 0.0;
    int64_t count = 0;
    for (int y = pad; y < h - pad; ++y) {
        for (int x = pad; x < w - pad; ++x) {
            int64_t i = static_cast<int64_t>(y) * w + x;
            double mx = s.ux[i], my = s.uy[i];
            double vx = s.uxx[i] - mx * mx;
            double vy = s.uyy[i] - my * my;
            double vxy = s.uxy[i] - mx * my;
            double a1 = 2 * mx * my + kC1, a2 = 2 * vxy + kC2;
            double b1 = mx * mx + my * my + kC1, b2 = vx + vy + kC2;
            sum += (a1 * a2) / (b1 * b2);
            ++count;
        }
    }
    return sum / static_cast<double>(count);
}

}  // namespace

double ssim(const Image& a, const Image& b) {
    check_shapes(a, b);
    const int h = a.height(), w = a.width();
    const int r = effective_radius(h, w);
    const auto k = kernels::GaussianKernel::make(kSigma, r);
    PlaneStats s;
    double total = 0.0;
    for (int c = 0; c < 3; ++c) {
        compute_stats(a, b, c, k, s);
        total += mean_ssim_of_stats(s, h, w, r);
    }
    return total / 3.0;
}

void ssim_backward(const Image& a, const Image& b, double upstream, Image& grad) {
    check_shapes(a, b);
    if (!grad.same_shape(b)) throw ConfigError("ssim_backward: gradient shape differs");
    const int h = a.height(), w = a.width();
    const int64_t n = static_cast<int64_t>(h) * w;
    const int r = effective_radius(h, w);
    const auto k = kernels::GaussianKernel::make(kSigma, r);

    int64_t count = static_cast<int64_t>(h - 2 * r) * (w - 2 * r);
    const double scale = upstream / (3.0 * static_cast<double>(count));

    PlaneStats s;
    std::vector<double> g_uy(n), g_uyy(n), g_uxy(n), adj(n), tmp(n);
    for (int c = 0; c < 3; ++c) {
        compute_stats(a, b, c, k, s);
        std::fill(g_uy.begin(), g_uy.end(), 0.0);
        std::fill(g_uyy.begin(), g_uyy.end(), 0.0);
        std::fill(g_uxy.begin(), g_uxy.end(), 0.0);
        par::for_n(h - 2 * r, [&](int64_t row) {
            int y = static_cast<int>(row) + r;
            for (int x = r; x < w - r; ++x) {
                int64_t i = static_cast<int64_t>(y) * w + x;
                double mx = s.ux[i], my = s.uy[i];
                double vx = s.uxx[i] - mx * mx;
                double vy = s.uyy[i] - my * my;
                double vxy = s.uxy[i] - mx * my;
                double a1 = 2 * mx * my + kC1, a2 = 2 * vxy + kC2;
                double b1 = mx * mx + my * my + kC1, b2 = vx + vy + kC2;
                double nmr = a1 * a2, dnm = b1 * b2;
                double inv_d = 1.0 / dnm;
                double inv_d2 = inv_d * inv_d;
                // dS/d(mean_y), dS/d(E[y^2]), dS/d(E[x y])
                double ds_duy = (2 * mx * (a2 - a1) * dnm - 2 * my * (b2 - b1) * nmr) * inv_d2;
                double ds_duyy = -nmr * b1 * inv_d2;
                double ds_duxy = 2 * a1 * inv_d;
                g_uy[i] = scale * ds_duy;
                g_uyy[i] = scale * ds_duyy;
                g_uxy[i] = scale * ds_duxy;
            }
        });
        // grad_b = G^T(g_uy) + 2 b . G^T(g_uyy) + a . G^T(g_uxy)
        double* gout = grad.data();
        kernels::gauss_filter_plane_adjoint(g_uy.data(), h, w, k, adj.data(), tmp.data());
        for (int64_t i = 0; i < n; ++i) gout[i * 3 + c] += adj[i];
        kernels::gauss_filter_plane_adjoint(g_uyy.data(), h, w, k, adj.data(), tmp.data());
        for (int64_t i = 0; i < n; ++i) gout[i * 3 + c] += 2.0 * s.bx[i] * adj[i];
        kernels::gauss_filter_plane_adjoint(g_uxy.data(), h, w, k, adj.data(), tmp.data());
        for (int64_t i = 0; i < n; ++i) gout[i * 3 + c] += s.ax[i] * adj[i];
    }
}

double ssim_reference(const Image& a, const Image& b) {
    check_shapes(a, b);
    const int h = a.height(), w = a.width();
    const int64_t n = static_cast<int64_t>(h) * w;
    const int r = effective_radius(h, w);
    const auto k = kernels::GaussianKernel::make(kSigma, r);
    std::vector<double> prod(n);
    PlaneStats s;
    s.resize(n);
    double total = 0.0;
    for (int c = 0; c < 3; ++c) {
        extract_plane(a, c, s.ax.data());
        extract_plane(b, c, s.bx.data());
        kernels::serial::gauss_filter_plane(s.ax.data(), h, w, k, s.ux.data());
        kernels::serial::gauss_filter_plane(s.bx.data(), h, w, k, s.uy.data());
        for (int64_t i = 0; i < n; ++i) prod[i] = s.ax[i] * s.ax[i];
        kernels::serial::gauss_filter_plane(prod.data(), h, w, k, s.uxx.data());
        for (int64_t i = 0; i < n; ++i) prod[i] = s.bx[i] * s.bx[i];
        kernels::serial::gauss_filter_plane(prod.data(), h, w, k, s.uyy.data());
        for (int64_t i = 0; i < n; ++i) prod[i] = s.ax[i] * s.bx[i];
        kernels::serial::gauss_filter_plane(prod.data(), h, w, k, s.uxy.data());
        total += mean_ssim_of_stats(s, h, w, r);
    }
    return total / 3.0;
}

}  // namespace illusion::loss

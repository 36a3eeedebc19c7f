#include "illusion/parametric/raw_pixel_image.hpp"

#include <algorithm>
#include <cmath>

#include "illusion/core/errors.hpp"
#include "illusion/core/parallel.hpp"
#include "illusion/core/rng.hpp"

namespace illusion::parametric {

namespace {
inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
}

RawPixelImage::RawPixelImage(int height, int width, uint64_t seed, double init_std) : h_(height), w_(width) {
    if (h_ < 1 || w_ < 1) throw ConfigError("pixels: resolution must be positive");
    logits_.resize(static_cast<size_t>(h_) * w_ * 3);
    RngStream rng(RngStream::derive_seed(seed, "pixel-init"));
    for (double& v : logits_) v = init_std * rng.normal();
}

std::unique_ptr<RawPixelImage> RawPixelImage::from_image(const Image& img) {
    auto out = std::unique_ptr<RawPixelImage>(new RawPixelImage());
    out->h_ = img.height();
    out->w_ = img.width();
    out->logits_.resize(img.sample_count());
    const double* p = img.data();
    for (size_t i = 0; i < out->logits_.size(); ++i) {
        double v = std::clamp(p[i], 1e-6, 1.0 - 1e-6);
        out->logits_[i] = std::log(v / (1.0 - v));
    }
    return out;
}

Image RawPixelImage::render() const {
    Image out(h_, w_);
    double* o = out.data();
    const double* l = logits_.data();
    par::for_n(static_cast<int64_t>(logits_.size()), [&](int64_t i) { o[i] = sigmoid(l[i]); });
    return out;
}

std::vector<TensorInfo> RawPixelImage::parameter_tensors() const {
    return {{"logits", {h_, w_, 3}, 0, logits_.size()}};
}

void RawPixelImage::get_parameters(std::span<double> out) const {
    if (out.size() != logits_.size()) throw ConfigError("get_parameters: size mismatch");
    std::copy(logits_.begin(), logits_.end(), out.begin());
}

void RawPixelImage::set_parameters(std::span<const double> in) {
    if (in.size() != logits_.size()) throw ConfigError("set_parameters: size mismatch");
    std::copy(in.begin(), in.end(), logits_.begin());
}

void RawPixelImage::accumulate_param_grad(const Image& pixel_grad, std::span<double> grad) const {
    if (pixel_grad.height() != h_ || pixel_grad.width() != w_) {
        throw ConfigError("accumulate_param_grad: pixel gradient shape mismatch");
    }
    if (grad.size() != logits_.size()) throw ConfigError("accumulate_param_grad: grad size mismatch");
    const double* g = pixel_grad.data();
    const double* l = logits_.data();
    double* out = grad.data();
    par::for_n(static_cast<int64_t>(logits_.size()), [&](int64_t i) {
        double s = sigmoid(l[i]);
        out[i] += g[i] * s * (1.0 - s);
    });
}

void RawPixelImage::save(BinaryWriter& w, const std::string& prefix) const {
    w.begin_section(prefix + "meta");
    w.put_string(kind());
    w.put_u32(static_cast<uint32_t>(h_));
    w.put_u32(static_cast<uint32_t>(w_));
    w.begin_section(prefix + "params");
    w.put_f64_array(logits_);
}

std::unique_ptr<RawPixelImage> RawPixelImage::load(BinaryReader& r, const std::string& prefix) {
    r.open_section(prefix + "meta");
    std::string kind = r.get_string();
    if (kind != "pixels") throw IoError("parametric kind mismatch: expected pixels, got " + kind);
    auto img = std::unique_ptr<RawPixelImage>(new RawPixelImage());
    img->h_ = static_cast<int>(r.get_u32());
    img->w_ = static_cast<int>(r.get_u32());
    r.open_section(prefix + "params");
    img->logits_ = r.get_f64_array();
    if (img->logits_.size() != static_cast<size_t>(img->h_) * img->w_ * 3) {
        throw IoError("parameter size mismatch in checkpoint");
    }
    return img;
}

std::unique_ptr<ParametricImage> RawPixelImage::clone() const {
    return std::make_unique<RawPixelImage>(*this);
}

}  // namespace illusion::parametric

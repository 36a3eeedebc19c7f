#include "illusion/parametric/ffn_image.hpp"

#include <cmath>

#include "illusion/core/errors.hpp"
#include "illusion/core/rng.hpp"

namespace illusion::parametric {

void FfnConfig::validate() const {
    if (num_features <= 0) throw ConfigError("ffn: num_features must be positive");
    if (frequency_scale <= 0) throw ConfigError("ffn: frequency_scale must be positive");
    if (hidden_widths.empty()) throw ConfigError("ffn: at least one hidden layer required");
    for (int wdt : hidden_widths) {
        if (wdt <= 0) throw ConfigError("ffn: hidden layer width must be positive");
    }
}

FourierFeatureImage::FourierFeatureImage(int height, int width, uint64_t seed, FfnConfig config)
    : h_(height), w_(width), seed_(seed), cfg_(std::move(config)) {
    cfg_.validate();
    if (h_ < 8 || w_ < 8) throw ConfigError("ffn: resolution dims must be >= 8");

    dims_.push_back(2 * cfg_.num_features);
    for (int wdt : cfg_.hidden_widths) dims_.push_back(wdt);
    dims_.push_back(3);

    RngStream rng(RngStream::derive_seed(seed_, "ffn-init"));
    freq_.resize(static_cast<size_t>(cfg_.num_features) * 2);
    for (double& f : freq_) f = cfg_.frequency_scale * rng.normal();

    size_t total = 0;
    for (size_t l = 0; l + 1 < dims_.size(); ++l) {
        total += static_cast<size_t>(dims_[l + 1]) * dims_[l] + dims_[l + 1];
    }
    params_.resize(total);
    size_t off = 0;
    for (size_t l = 0; l + 1 < dims_.size(); ++l) {
        const int nin = dims_[l], nout = dims_[l + 1];
        const double bound = std::sqrt(6.0 / (nin + nout));
        for (int i = 0; i < nin * nout; ++i) params_[off++] = bound * (2.0 * rng.uniform() - 1.0);
        for (int i = 0; i < nout; ++i) params_[off++] = 0.0;  // biases
    }
}

kernels::FfnView FourierFeatureImage::view() const {
    kernels::FfnView v;
    v.freq = freq_.data();
    v.num_features = cfg_.num_features;
    v.dims = dims_;
    size_t off = 0;
    for (size_t l = 0; l + 1 < dims_.size(); ++l) {
        v.weights.push_back(params_.data() + off);
        off += static_cast<size_t>(dims_[l + 1]) * dims_[l];
        v.biases.push_back(params_.data() + off);
        off += dims_[l + 1];
    }
    return v;
}

Image FourierFeatureImage::render() const { return render_at_resolution(h_, w_); }

Image FourierFeatureImage::render_at_resolution(int height, int width) const {
    Image out(height, width);
    kernels::ffn_render(view(), height, width, out.data());
    return out;
}

std::vector<double> FourierFeatureImage::render_points(std::span<const double> xy) const {
    if (xy.size() % 2 != 0) throw ConfigError("render_points: xy must be pairs");
    std::vector<double> out(xy.size() / 2 * 3);
    kernels::ffn_render_points(view(), xy.data(), static_cast<int64_t>(xy.size() / 2), out.data());
    return out;
}

std::vector<TensorInfo> FourierFeatureImage::parameter_tensors() const {
    std::vector<TensorInfo> infos;
    size_t off = 0;
    for (size_t l = 0; l + 1 < dims_.size(); ++l) {
        const int nin = dims_[l], nout = dims_[l + 1];
        infos.push_back({"layer" + std::to_string(l) + ".weight", {nout, nin}, off,
                         static_cast<size_t>(nout) * nin});
        off += static_cast<size_t>(nout) * nin;
        infos.push_back({"layer" + std::to_string(l) + ".bias", {nout}, off, static_cast<size_t>(nout)});
        off += nout;
    }
    return infos;
}

void FourierFeatureImage::get_parameters(std::span<double> out) const {
    if (out.size() != params_.size()) throw ConfigError("get_parameters: size mismatch");
    std::copy(params_.begin(), params_.end(), out.begin());
}

void FourierFeatureImage::set_parameters(std::span<const double> in) {
    if (in.size() != params_.size()) throw ConfigError("set_parameters: size mismatch");
    std::copy(in.begin(), in.end(), params_.begin());
}

void FourierFeatureImage::accumulate_param_grad(const Image& pixel_grad, std::span<double> grad) const {
    if (pixel_grad.height() != h_ || pixel_grad.width() != w_) {
        throw ConfigError("accumulate_param_grad: pixel gradient shape mismatch");
    }
    if (grad.size() != params_.size()) throw ConfigError("accumulate_param_grad: grad size mismatch");
    kernels::ffn_param_grad(view(), h_, w_, pixel_grad.data(), grad.data());
}

void FourierFeatureImage::save(BinaryWriter& w, const std::string& prefix) const {
    w.begin_section(prefix + "meta");
    w.put_string(kind());
    w.put_u32(static_cast<uint32_t>(h_));
    w.put_u32(static_cast<uint32_t>(w_));
    w.put_u64(seed_);
    w.put_u32(static_cast<uint32_t>(cfg_.num_features));
    w.put_f64(cfg_.frequency_scale);
    w.put_u32(static_cast<uint32_t>(cfg_.hidden_widths.size()));
    for (int h : cfg_.hidden_widths) w.put_u32(static_cast<uint32_t>(h));
    w.begin_section(prefix + "freq");
    w.put_f64_array(freq_);
    w.begin_section(prefix + "params");
    w.put_f64_array(params_);
}

std::unique_ptr<FourierFeatureImage> FourierFeatureImage::load(BinaryReader& r, const std::string& prefix) {
    r.open_section(prefix + "meta");
    std::string kind = r.get_string();
    if (kind != "ffn") throw IoError("parametric kind mismatch: expected ffn, got " + kind);
    int h = static_cast<int>(r.get_u32());
    int w = static_cast<int>(r.get_u32());
    uint64_t seed = r.get_u64();
    FfnConfig cfg;
    cfg.num_features = static_cast<int>(r.get_u32());
    cfg.frequency_scale = r.get_f64();
    uint32_t nhidden = r.get_u32();
    cfg.hidden_widths.clear();
    for (uint32_t i = 0; i < nhidden; ++i) cfg.hidden_widths.push_back(static_cast<int>(r.get_u32()));

    auto img = std::make_unique<FourierFeatureImage>(h, w, seed, cfg);
    r.open_section(prefix + "freq");
    auto freq = r.get_f64_array();
    if (freq.size() != img->freq_.size()) throw IoError("frequency matrix size mismatch in checkpoint");
    img->freq_ = std::move(freq);
    r.open_section(prefix + "params");
    auto params = r.get_f64_array();
    if (params.size() != img->params_.size()) throw IoError("parameter size mismatch in checkpoint");
    img->params_ = std::move(params);
    return img;
}

std::unique_ptr<ParametricImage> FourierFeatureImage::clone() const {
    return std::make_unique<FourierFeatureImage>(*this);
}

std::unique_ptr<FourierFeatureImage> create_ffn(int height, int width, uint64_t seed, const FfnConfig& config) {
    return std::make_unique<FourierFeatureImage>(height, width, seed, config);
}

}  // namespace illusion::parametric

#include "illusion/eval/embedder.hpp"

#include "illusion/core/errors.hpp"
#include "illusion/core/rng.hpp"

namespace illusion::eval {

namespace {
constexpr int kPatch = 8;
constexpr int kFeatDim = kPatch * kPatch * 3 + 1;  // + constant bias term
}  // namespace

MockEmbedder::MockEmbedder(uint64_t seed, int dim) : seed_(seed), dim_(dim) {
    if (dim_ < 2) throw ConfigError("mock embedder dim must be >= 2");
    RngStream rng(RngStream::derive_seed(seed_, "mock-image-projection"));
    projection_.resize(static_cast<size_t>(dim_) * kFeatDim);
    for (double& v : projection_) v = rng.normal();
}

std::vector<double> MockEmbedder::embed_image(const Image& img) const {
    if (img.empty()) throw ConfigError("embed_image: empty image");
    Image small = resample_box(img, kPatch, kPatch);
    std::vector<double> feat(kFeatDim);
    for (size_t i = 0; i < small.sample_count(); ++i) feat[i] = small.samples()[i] - 0.5;
    feat[kFeatDim - 1] = 1.0;

    std::vector<double> out(dim_);
    for (int d = 0; d < dim_; ++d) {
        double acc = 0.0;
        const double* row = projection_.data() + static_cast<size_t>(d) * kFeatDim;
        for (int i = 0; i < kFeatDim; ++i) acc += row[i] * feat[i];
        out[d] = acc;
    }
    return out;
}

std::vector<double> MockEmbedder::embed_text(const std::string& text) const {
    RngStream rng(RngStream::derive_seed(seed_, "mock-text:" + text));
    std::vector<double> out(dim_);
    for (double& v : out) v = rng.normal();
    return out;
}

}  // namespace illusion::eval

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "illusion/core/image.hpp"

namespace illusion::eval {

// Text/image embedding surface for the metric suite. Real CLIP/DINO scorers
// are optional adapters; the deterministic mock below keeps everything
// testable offline.
class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::vector<double> embed_image(const Image& img) const = 0;
    virtual std::vector<double> embed_text(const std::string& text) const = 0;
    virtual int dim() const = 0;
    virtual std::string name() const = 0;
};

// Seeded random projection of a box-downsampled image; hashed Gaussian
// features for text. Deterministic in (seed, input).
class MockEmbedder : public Embedder {
public:
    explicit MockEmbedder(uint64_t seed = 0, int dim = 64);

    std::vector<double> embed_image(const Image& img) const override;
    std::vector<double> embed_text(const std::string& text) const override;
    int dim() const override { return dim_; }
    std::string name() const override { return "mock"; }

private:
    uint64_t seed_;
    int dim_;
    std::vector<double> projection_;  // dim x (8*8*3 + 1)
};

}  // namespace illusion::eval

#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "illusion/core/binary_io.hpp"
#include "illusion/core/image.hpp"

namespace illusion::parametric {

struct TensorInfo {
    std::string name;
    std::vector<int> shape;
    size_t offset = 0;  // into the flat parameter vector
    size_t size = 0;
};

// A differentiably parameterized image. Parameters are exposed as one flat
// vector with a stable tensor layout; rendering is a pure function of the
// parameters and the resolution.
class ParametricImage {
public:
    virtual ~ParametricImage() = default;

    virtual std::string kind() const = 0;
    virtual int height() const = 0;
    virtual int width() const = 0;

    virtual Image render() const = 0;

    virtual size_t parameter_count() const = 0;
    virtual std::vector<TensorInfo> parameter_tensors() const = 0;
    virtual void get_parameters(std::span<double> out) const = 0;
    virtual void set_parameters(std::span<const double> in) = 0;

    // Accumulates dL/dparams given dL/dpixels of render().
    virtual void accumulate_param_grad(const Image& pixel_grad, std::span<double> grad) const = 0;

    virtual void save(BinaryWriter& w, const std::string& prefix) const = 0;
    virtual std::unique_ptr<ParametricImage> clone() const = 0;
};

std::unique_ptr<ParametricImage> load_parametric(BinaryReader& r, const std::string& prefix);

// Standalone parameter-checkpoint files.
void save_parametric_file(const std::string& path, const ParametricImage& img);
std::unique_ptr<ParametricImage> load_parametric_file(const std::string& path);

}  // namespace illusion::parametric

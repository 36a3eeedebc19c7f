#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace illusion {

// Interleaved RGB raster with double precision samples.
// data()[(y * width + x) * 3 + c], row-major, c in {0,1,2}.
class Image {
public:
    Image() = default;
    Image(int height, int width) : h_(height), w_(width), data_(static_cast<size_t>(height) * width * 3, 0.0) {}

    static Image constant(int height, int width, double value) {
        Image img(height, width);
        for (double& v : img.data_) v = value;
        return img;
    }

    int height() const { return h_; }
    int width() const { return w_; }
    bool empty() const { return data_.empty(); }
    size_t sample_count() const { return data_.size(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::span<double> samples() { return data_; }
    std::span<const double> samples() const { return data_; }

    double& at(int y, int x, int c) { return data_[(static_cast<size_t>(y) * w_ + x) * 3 + c]; }
    double at(int y, int x, int c) const { return data_[(static_cast<size_t>(y) * w_ + x) * 3 + c]; }

    bool same_shape(const Image& o) const { return h_ == o.h_ && w_ == o.w_; }

    void fill(double v) {
        for (double& s : data_) s = v;
    }

    bool operator==(const Image& o) const { return h_ == o.h_ && w_ == o.w_ && data_ == o.data_; }

private:
    int h_ = 0;
    int w_ = 0;
    std::vector<double> data_;
};

// Quarter-turn counterclockwise rotation; requires a square image.
Image rot90(const Image& in, int quarter_turns = 1);

// 180-degree rotation; works for any shape.
Image rot180(const Image& in);

// Box-filter resample to the requested shape (used for downsampling).
Image resample_box(const Image& in, int out_h, int out_w);

// Bilinear resample to the requested shape.
Image resample_bilinear(const Image& in, int out_h, int out_w);

// Nearest-neighbor resample to the requested shape.
Image resample_nearest(const Image& in, int out_h, int out_w);

}  // namespace illusion

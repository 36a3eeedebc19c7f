#include "illusion/core/synthetic.hpp"

#include <algorithm>

#include "illusion/core/errors.hpp"
#include "illusion/core/rng.hpp"

namespace illusion {

Image smooth_random_image(int h, int w, uint64_t seed, int octaves, double lo, double hi) {
    if (h < 1 || w < 1) throw ConfigError("smooth_random_image: bad resolution");
    if (octaves < 1) octaves = 1;
    RngStream rng(RngStream::derive_seed(seed, "smooth-image"));
    Image acc(h, w);
    double amp = 1.0;
    int grid = 4;
    for (int o = 0; o < octaves; ++o) {
        Image coarse(grid, grid);
        for (double& v : coarse.samples()) v = rng.uniform();
        Image up = resample_bilinear(coarse, h, w);
        for (size_t i = 0; i < acc.sample_count(); ++i) acc.samples()[i] += amp * up.samples()[i];
        amp *= 0.5;
        grid *= 2;
    }
    double mn = acc.samples()[0], mx = acc.samples()[0];
    for (double v : acc.samples()) {
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    double span = mx > mn ? mx - mn : 1.0;
    for (double& v : acc.samples()) v = lo + (hi - lo) * (v - mn) / span;
    return acc;
}

Image gradient_image(int h, int w) {
    Image img(h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            img.at(y, x, 0) = h > 1 ? static_cast<double>(y) / (h - 1) : 0.0;
            img.at(y, x, 1) = w > 1 ? static_cast<double>(x) / (w - 1) : 0.0;
            img.at(y, x, 2) = 0.5;
        }
    }
    return img;
}

}  // namespace illusion

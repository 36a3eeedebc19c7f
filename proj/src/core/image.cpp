#include "illusion/core/image.hpp"

#include <algorithm>
#include <cmath>

#include "illusion/core/errors.hpp"

namespace illusion {

Image rot90(const Image& in, int quarter_turns) {
    int q = ((quarter_turns % 4) + 4) % 4;
    if (q == 0) return in;
    if (q == 2) return rot180(in);
    if (in.height() != in.width()) {
        throw ConfigError("rot90 requires a square image");
    }
    const int n = in.height();
    Image out(n, n);
    if (q == 1) {
        // counterclockwise: out(r,c) = in(c, n-1-r)
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                for (int ch = 0; ch < 3; ++ch) out.at(r, c, ch) = in.at(c, n - 1 - r, ch);
    } else {  // q == 3, clockwise
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                for (int ch = 0; ch < 3; ++ch) out.at(r, c, ch) = in.at(n - 1 - c, r, ch);
    }
    return out;
}

Image rot180(const Image& in) {
    const int h = in.height(), w = in.width();
    Image out(h, w);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            for (int ch = 0; ch < 3; ++ch) out.at(r, c, ch) = in.at(h - 1 - r, w - 1 - c, ch);
    return out;
}

Image resample_nearest(const Image& in, int out_h, int out_w) {
    Image out(out_h, out_w);
    for (int r = 0; r < out_h; ++r) {
        int sr = std::min(in.height() - 1, static_cast<int>((r + 0.5) * in.height() / out_h));
        for (int c = 0; c < out_w; ++c) {
            int sc = std::min(in.width() - 1, static_cast<int>((c + 0.5) * in.width() / out_w));
            for (int ch = 0; ch < 3; ++ch) out.at(r, c, ch) = in.at(sr, sc, ch);
        }
    }
    return out;
}

Image resample_bilinear(const Image& in, int out_h, int out_w) {
    if (in.height() == out_h && in.width() == out_w) return in;
    Image out(out_h, out_w);
    for (int r = 0; r < out_h; ++r) {
        double fy = (r + 0.5) * in.height() / out_h - 0.5;
        int y0 = static_cast<int>(std::floor(fy));
        double ty = fy - y0;
        int y1 = std::clamp(y0 + 1, 0, in.height() - 1);
        y0 = std::clamp(y0, 0, in.height() - 1);
        for (int c = 0; c < out_w; ++c) {
            double fx = (c + 0.5) * in.width() / out_w - 0.5;
            int x0 = static_cast<int>(std::floor(fx));
            double tx = fx - x0;
            int x1 = std::clamp(x0 + 1, 0, in.width() - 1);
            x0 = std::clamp(x0, 0, in.width() - 1);
            for (int ch = 0; ch < 3; ++ch) {
                double top = in.at(y0, x0, ch) * (1 - tx) + in.at(y0, x1, ch) * tx;
                double bot = in.at(y1, x0, ch) * (1 - tx) + in.at(y1, x1, ch) * tx;
                out.at(r, c, ch) = top * (1 - ty) + bot * ty;
            }
        }
    }
    return out;
}

Image resample_box(const Image& in, int out_h, int out_w) {
    Image out(out_h, out_w);
    for (int r = 0; r < out_h; ++r) {
        int y0 = r * in.height() / out_h;
        int y1 = std::max(y0 + 1, (r + 1) * in.height() / out_h);
        for (int c = 0; c < out_w; ++c) {
            int x0 = c * in.width() / out_w;
            int x1 = std::max(x0 + 1, (c + 1) * in.width() / out_w);
            for (int ch = 0; ch < 3; ++ch) {
                double s = 0.0;
                for (int y = y0; y < y1; ++y)
                    for (int x = x0; x < x1; ++x) s += in.at(y, x, ch);
                out.at(r, c, ch) = s / ((y1 - y0) * (x1 - x0));
            }
        }
    }
    return out;
}

}  // namespace illusion

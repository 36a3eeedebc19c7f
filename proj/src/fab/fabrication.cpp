#include "illusion/fab/fabrication.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "illusion/core/errors.hpp"
#include "illusion/core/image_io.hpp"

namespace illusion::fab {

int raster_pixels(const PageLayout& layout) {
    if (layout.dpi < 1 || !(layout.size_mm > 0)) throw ConfigError("bad page layout");
    return static_cast<int>(std::lround(layout.size_mm / 25.4 * layout.dpi));
}

Image simulate_view(const arrange::IllusionSpec& spec, std::span<const Image> primes, int j,
                    double backlight_gain) {
    if (!(backlight_gain > 0)) throw ConfigError("simulate_view: backlight gain must be > 0");
    return arrange::derive_with_gain(spec, primes, j, backlight_gain);
}

Image contact_sheet(std::span<const Image> images, int panel) {
    if (images.empty()) throw ConfigError("contact_sheet: no images");
    const int n = static_cast<int>(images.size());
    const int cols = std::min(n, 3);
    const int rows = (n + cols - 1) / cols;
    const int margin = 8;
    Image sheet = Image::constant(rows * (panel + margin) + margin, cols * (panel + margin) + margin, 1.0);
    for (int i = 0; i < n; ++i) {
        Image thumb = images[i].height() == panel && images[i].width() == panel
                          ? images[i]
                          : resample_bilinear(images[i], panel, panel);
        const int r0 = margin + (i / cols) * (panel + margin);
        const int c0 = margin + (i % cols) * (panel + margin);
        for (int y = 0; y < panel; ++y)
            for (int x = 0; x < panel; ++x)
                for (int c = 0; c < 3; ++c) sheet.at(r0 + y, c0 + x, c) = thumb.at(y, x, c);
    }
    return sheet;
}

namespace {

// Pads the page and draws corner ticks just outside the image area.
Image with_crop_marks(const Image& img) {
    const int mark = 24, gap = 4;
    const int h = img.height(), w = img.width();
    Image page = Image::constant(h + 2 * (mark + gap), w + 2 * (mark + gap), 1.0);
    const int o = mark + gap;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c) page.at(o + y, o + x, c) = img.at(y, x, c);
    auto hline = [&](int y, int x0, int x1) {
        for (int x = x0; x < x1; ++x)
            for (int c = 0; c < 3; ++c) page.at(y, x, c) = 0.0;
    };
    auto vline = [&](int x, int y0, int y1) {
        for (int y = y0; y < y1; ++y)
            for (int c = 0; c < 3; ++c) page.at(y, x, c) = 0.0;
    };
    const int H = page.height(), W = page.width();
    hline(o - gap - 1, 0, mark);
    vline(o - gap - 1, 0, mark);
    hline(o - gap - 1, W - mark, W);
    vline(W - o + gap, 0, mark);
    hline(H - o + gap, 0, mark);
    vline(o - gap - 1, H - mark, H);
    hline(H - o + gap, W - mark, W);
    vline(W - o + gap, H - mark, H);
    return page;
}

}  // namespace

ExportResult export_print_sheets(const arrange::IllusionSpec& spec, std::span<const Image> primes,
                                 const PageLayout& layout, const std::string& out_dir) {
    spec.validate();
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (!std::filesystem::is_directory(out_dir)) {
        throw IoError("cannot create export directory: " + out_dir);
    }

    const int px = raster_pixels(layout);
    ExportResult result;
    for (size_t i = 0; i < primes.size(); ++i) {
        Image sheet = (primes[i].height() == px && primes[i].width() == px)
                          ? primes[i]
                          : resample_bilinear(primes[i], px, px);
        if (layout.crop_marks) sheet = with_crop_marks(sheet);
        std::string path = out_dir + "/prime_" + std::to_string(i + 1) + ".png";
        write_png(path, sheet);
        result.files.push_back(path);
    }

    std::vector<Image> views;
    for (int j = 1; j <= spec.m; ++j) {
        double gain = spec.brightness_k > 0 ? spec.brightness_k : 1.0;
        views.push_back(simulate_view(spec, primes, j, gain));
    }
    std::string preview = out_dir + "/contact_sheet.png";
    write_png(preview, contact_sheet(views));
    result.files.push_back(preview);
    return result;
}

}  // namespace illusion::fab

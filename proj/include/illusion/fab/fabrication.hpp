#pragma once

#include <span>
#include <string>
#include <vector>

#include "illusion/arrange/arrangements.hpp"
#include "illusion/core/image.hpp"

namespace illusion::fab {

struct PageLayout {
    double size_mm = 86.7;
    int dpi = 150;
    bool crop_marks = false;
};

// round(size_mm / 25.4 * dpi)
int raster_pixels(const PageLayout& layout);

// Physical viewing simulation: the overlay brightness constant is replaced by
// the backlight gain. At gain == spec.brightness_k this is exactly derive().
// Flip arrangements have no backlight and ignore the gain.
Image simulate_view(const arrange::IllusionSpec& spec, std::span<const Image> primes, int j,
                    double backlight_gain);

// Grid preview of the given images, each panel `panel` pixels wide.
Image contact_sheet(std::span<const Image> images, int panel = 192);

struct ExportResult {
    std::vector<std::string> files;
};

// One print-ready PNG per prime at the requested physical size plus a
// contact-sheet preview of all simulated derived images. Note that a
// rotation overlay exports its rotator once; spinning it physically supplies
// the remaining views.
ExportResult export_print_sheets(const arrange::IllusionSpec& spec, std::span<const Image> primes,
                                 const PageLayout& layout, const std::string& out_dir);

}  // namespace illusion::fab

#include "illusion/parametric/parametric_image.hpp"

#include "illusion/core/errors.hpp"
#include "illusion/parametric/ffn_image.hpp"
#include "illusion/parametric/raw_pixel_image.hpp"

namespace illusion::parametric {

std::unique_ptr<ParametricImage> load_parametric(BinaryReader& r, const std::string& prefix) {
    r.open_section(prefix + "meta");
    std::string kind = r.get_string();
    if (kind == "ffn") return FourierFeatureImage::load(r, prefix);
    if (kind == "pixels") return RawPixelImage::load(r, prefix);
    throw IoError("unknown parametric image kind: " + kind);
}

void save_parametric_file(const std::string& path, const ParametricImage& img) {
    BinaryWriter w;
    img.save(w, "image/");
    w.save(path);
}

std::unique_ptr<ParametricImage> load_parametric_file(const std::string& path) {
    BinaryReader r(path);
    return load_parametric(r, "image/");
}

}  // namespace illusion::parametric

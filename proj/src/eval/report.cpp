#include "illusion/eval/report.hpp"

#include <algorithm>
#include <cmath>

#include "illusion/core/errors.hpp"

namespace illusion::eval {

void MetricsReport::finalize() {
    double csum = 0.0, isum = 0.0, asum = 0.0;
    int64_t ccount = 0, acount = 0;
    std::map<std::string, std::pair<double, int>> vsums;
    for (const auto& g : groups) {
        for (double v : g.controllability) {
            csum += v;
            ++ccount;
        }
        isum += g.independence;
        for (const auto& [name, v] : g.vendi) {
            vsums[name].first += v;
            vsums[name].second += 1;
        }
        if (g.aesthetics) {
            for (double v : *g.aesthetics) {
                asum += v;
                ++acount;
            }
        }
    }
    mean_controllability = ccount ? csum / ccount : 0.0;
    mean_independence = groups.empty() ? 0.0 : isum / static_cast<double>(groups.size());
    mean_vendi.clear();
    for (const auto& [name, sc] : vsums) mean_vendi[name] = sc.first / sc.second;
    if (acount) mean_aesthetics = asum / acount;
}

Image render_histogram(std::span<const double> values, int bins, int width, int height) {
    if (values.empty()) throw ConfigError("histogram: no values");
    if (bins < 1 || width < 16 || height < 16) throw ConfigError("histogram: bad geometry");
    double lo = values[0], hi = values[0];
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi <= lo) hi = lo + 1.0;
    std::vector<int> counts(bins, 0);
    for (double v : values) {
        int b = static_cast<int>((v - lo) / (hi - lo) * bins);
        counts[std::clamp(b, 0, bins - 1)] += 1;
    }
    int peak = *std::max_element(counts.begin(), counts.end());

    Image img = Image::constant(height, width, 1.0);
    const int margin = 8;
    const int plot_w = width - 2 * margin, plot_h = height - 2 * margin;
    for (int b = 0; b < bins; ++b) {
        int x0 = margin + b * plot_w / bins;
        int x1 = margin + (b + 1) * plot_w / bins - 1;
        int bar = static_cast<int>(std::lround(static_cast<double>(counts[b]) / peak * (plot_h - 1)));
        for (int x = x0; x <= x1; ++x) {
            for (int y = height - margin - bar; y < height - margin; ++y) {
                for (int c = 0; c < 3; ++c) img.at(y, x, c) = 0.25;
            }
        }
    }
    for (int x = margin; x < width - margin; ++x) {
        for (int c = 0; c < 3; ++c) img.at(height - margin, x, c) = 0.0;
    }
    return img;
}

}  // namespace illusion::eval

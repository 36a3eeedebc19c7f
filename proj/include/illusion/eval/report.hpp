#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "illusion/core/image.hpp"

namespace illusion::eval {

struct GroupMetrics {
    std::string id;
    int style_index = -1;
    std::vector<std::string> prompts;
    std::vector<double> controllability;
    std::map<std::string, double> vendi;  // embedder name -> within-group diversity
    double independence = 0.0;
    std::optional<std::vector<double>> aesthetics;
};

struct MetricsReport {
    std::vector<GroupMetrics> groups;
    // filled by finalize()
    double mean_controllability = 0.0;
    double mean_independence = 0.0;
    std::map<std::string, double> mean_vendi;
    std::optional<double> mean_aesthetics;
    // paper-style diversity: one score per repeated prompt across groups
    std::map<std::string, double> per_prompt_vendi;

    void finalize();
};

// Minimal bar-chart rendering for metric distributions (white background,
// black bars, baseline axis).
Image render_histogram(std::span<const double> values, int bins = 20, int width = 480, int height = 320);

}  // namespace illusion::eval

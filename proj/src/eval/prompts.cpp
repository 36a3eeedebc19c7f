#include "illusion/eval/prompts.hpp"

#include "illusion/core/errors.hpp"
#include "illusion/core/rng.hpp"

namespace illusion::eval {

std::vector<std::string> PromptProtocol::default_styles() {
    return {
        "3d pixar style render animation of a <s>",
        "an award winning photograph of a <s>",
        "an award winning photograph of a <s> in the deep jungle",
        "an award winning photograph of a <s> in times square",
    };
}

std::string PromptProtocol::rotation_style() {
    return "a beautiful award-winning royalty-free full-frame stock photo of an isolated <s>";
}

std::vector<std::string> PromptProtocol::voc_subjects() {
    return {"aeroplane", "bicycle",      "bird",  "boat",  "bottle", "bus",   "car",
            "cat",       "chair",        "cow",   "dining table", "dog",   "horse",
            "motorbike", "potted plant", "sheep", "sofa",  "train",  "tv/monitor"};
}

PromptProtocol PromptProtocol::defaults() {
    PromptProtocol p;
    p.styles = default_styles();
    p.subjects = voc_subjects();
    p.group_size = 5;
    p.groups_per_style = 64;
    p.seed = 0;
    return p;
}

std::string substitute_subject(const std::string& style_template, const std::string& subject) {
    std::string out = style_template;
    const std::string token = "<s>";
    size_t pos = 0;
    while ((pos = out.find(token, pos)) != std::string::npos) {
        out.replace(pos, token.size(), subject);
        pos += subject.size();
    }
    return out;
}

std::vector<PromptGroup> build_prompt_groups(const PromptProtocol& protocol) {
    if (protocol.styles.empty()) throw ConfigError("prompt protocol: no styles");
    if (protocol.group_size < 1) throw ConfigError("prompt protocol: group_size must be >= 1");
    if (protocol.group_size > static_cast<int>(protocol.subjects.size())) {
        throw ConfigError("prompt protocol: group_size exceeds the subject pool (" +
                          std::to_string(protocol.subjects.size()) + ")");
    }
    if (protocol.groups_per_style < 1) throw ConfigError("prompt protocol: groups_per_style must be >= 1");

    RngStream rng(RngStream::derive_seed(protocol.seed, "prompt-protocol"));
    std::vector<PromptGroup> groups;
    groups.reserve(protocol.styles.size() * protocol.groups_per_style);
    for (size_t s = 0; s < protocol.styles.size(); ++s) {
        for (int g = 0; g < protocol.groups_per_style; ++g) {
            // sample without replacement: partial Fisher-Yates
            std::vector<std::string> pool = protocol.subjects;
            PromptGroup group;
            group.style_index = static_cast<int>(s);
            for (int k = 0; k < protocol.group_size; ++k) {
                int64_t pick = rng.uniform_int(k, static_cast<int64_t>(pool.size()) - 1);
                std::swap(pool[k], pool[pick]);
                group.subjects.push_back(pool[k]);
                group.prompts.push_back(substitute_subject(protocol.styles[s], pool[k]));
            }
            groups.push_back(std::move(group));
        }
    }
    return groups;
}

}  // namespace illusion::eval

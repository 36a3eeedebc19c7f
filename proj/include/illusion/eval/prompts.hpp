#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace illusion::eval {

// Random prompt-construction protocol: per group, `group_size` unique
// subjects are sampled without replacement and substituted into one style
// template; `groups_per_style` groups are built per style.
struct PromptProtocol {
    std::vector<std::string> styles;    // templates containing the "<s>" token
    std::vector<std::string> subjects;
    int group_size = 5;
    int groups_per_style = 64;
    uint64_t seed = 0;

    static PromptProtocol defaults();
    static std::vector<std::string> default_styles();
    static std::string rotation_style();
    static std::vector<std::string> voc_subjects();  // PASCAL VOC minus 'person'
};

struct PromptGroup {
    int style_index = 0;
    std::vector<std::string> subjects;
    std::vector<std::string> prompts;
};

std::string substitute_subject(const std::string& style_template, const std::string& subject);

std::vector<PromptGroup> build_prompt_groups(const PromptProtocol& protocol);

}  // namespace illusion::eval

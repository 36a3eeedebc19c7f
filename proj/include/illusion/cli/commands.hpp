#pragma once

#include <string>

#include <json.hpp>

#include "illusion/cli/config.hpp"
#include "illusion/fab/fabrication.hpp"

namespace illusion::cli {

// Exit codes: 0 success, 2 validation failure, 3 backend failure,
// 4 numeric abort, 1 anything else.
int exit_code_for_current_exception();

// Full pipeline: phases 1+2, PNG artifacts, trace, checkpoint, optional
// metrics report and an HTML contact sheet under output_dir.
int run_command(const RunConfig& config, const std::string& resume_checkpoint = {});

// Prints one diagnostic line per violated invariant; exit 2 when any.
int validate_command(const RunConfig& config);

struct EvaluateOptions {
    std::string images_dir;
    std::string out_dir;
    uint64_t embedder_seed = 0;
    double temperature = 0.05;
};
int evaluate_command(const EvaluateOptions& options);

struct ExportOptions {
    std::string checkpoint;
    std::string out_dir;
    fab::PageLayout layout;
};
int export_command(const ExportOptions& options);

// Structural check of a metrics report document; returns problems.
std::vector<std::string> check_report_json(const nlohmann::json& report);

}  // namespace illusion::cli

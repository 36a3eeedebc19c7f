#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "illusion/arrange/arrangements.hpp"
#include "illusion/eval/prompts.hpp"
#include "illusion/guidance/backend.hpp"
#include "illusion/opt/runner.hpp"
#include "illusion/parametric/parametric_image.hpp"

namespace illusion::cli {

struct Diagnostic {
    std::string path;     // config key path, e.g. "illusion.weights[2]"
    std::string message;
};

// One nested JSON document drives a whole run. Unknown keys are rejected,
// every field has a default, and nothing is computed until the config
// validates.
class RunConfig {
public:
    static RunConfig load(const std::string& path);
    static RunConfig from_json(nlohmann::json j, std::string base_dir);

    // --set key.path=value (value parsed as JSON, falling back to string)
    void apply_override(const std::string& assignment);

    // Full structural + invariant validation without compute.
    std::vector<Diagnostic> validate() const;
    void require_valid() const;  // throws ConfigError with all diagnostics

    uint64_t seed() const;
    int threads() const;
    std::string output_dir() const;
    int progress_every() const;
    int resolution() const;

    arrange::IllusionSpec make_spec(bool load_target_images) const;
    opt::ScheduleConfig make_schedule() const;
    std::unique_ptr<guidance::GuidanceBackend> make_backend(const arrange::IllusionSpec& spec) const;
    std::vector<std::unique_ptr<parametric::ParametricImage>> make_primes(
        const arrange::IllusionSpec& spec) const;

    bool evaluation_enabled() const;
    double evaluation_temperature() const;
    eval::PromptProtocol make_protocol() const;

    const nlohmann::json& json() const { return json_; }
    const std::string& base_dir() const { return base_dir_; }

private:
    std::string resolve_path(const std::string& p) const;

    nlohmann::json json_;
    std::string base_dir_;
};

}  // namespace illusion::cli

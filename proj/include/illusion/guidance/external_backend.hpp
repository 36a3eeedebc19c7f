#pragma once

#include <functional>
#include <memory>

#include "illusion/guidance/backend.hpp"

namespace illusion::guidance {

struct ExternalBackendConfig {
    std::string model_id;
    std::string device = "cpu";
    double guidance_scale = 7.5;
    std::string cache_dir;  // from ILLUSION_EXTERNAL_CACHE when empty
};

using ExternalBackendFactory =
    std::function<std::unique_ptr<GuidanceBackend>(const ExternalBackendConfig&)>;

// Adapter slot for a real diffusion model. Nothing in this repository
// provides one; deployments register a factory at startup. Without a
// registered factory, construction throws BackendError (never a silent
// fallback).
void register_external_backend(ExternalBackendFactory factory);
bool external_backend_registered();
std::unique_ptr<GuidanceBackend> make_external_backend(const ExternalBackendConfig& config);

}  // namespace illusion::guidance

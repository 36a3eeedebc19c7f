#include "illusion/guidance/external_backend.hpp"

#include "illusion/core/errors.hpp"

namespace illusion::guidance {

namespace {
ExternalBackendFactory& factory_slot() {
    static ExternalBackendFactory factory;
    return factory;
}
}  // namespace

void register_external_backend(ExternalBackendFactory factory) { factory_slot() = std::move(factory); }

bool external_backend_registered() { return static_cast<bool>(factory_slot()); }

std::unique_ptr<GuidanceBackend> make_external_backend(const ExternalBackendConfig& config) {
    if (!factory_slot()) {
        throw BackendError(
            "external diffusion backend requested but no adapter is registered in this build; "
            "use guidance.backend=oracle or link an adapter");
    }
    auto backend = factory_slot()(config);
    if (!backend) throw BackendError("external backend factory returned nothing");
    return backend;
}

}  // namespace illusion::guidance

#include "sectorflow/kernels.hpp"

#include <cstdlib>

#include "sectorflow/errors.hpp"

namespace sectorflow::kernels {

namespace {

const Backend* g_active = nullptr;

const Backend* pick(const std::string& name) {
    if (name == "scalar") return &scalar_backend();
#if defined(__x86_64__) || defined(_M_X64)
    if (name == "avx2") {
        if (!avx2_available()) throw config_error("kernels: avx2 requested but not supported by this CPU");
        return &avx2_backend();
    }
    if (name == "auto" || name.empty())
        return avx2_available() ? &avx2_backend() : &scalar_backend();
#else
    if (name == "avx2") throw config_error("kernels: avx2 backend unavailable on this architecture");
    if (name == "auto" || name.empty()) return &scalar_backend();
#endif
    throw config_error("kernels: unknown backend '" + name + "'");
}

} // namespace

const Backend& active() {
    if (!g_active) {
        const char* env = std::getenv("SECTORFLOW_KERNELS");
        g_active = pick(env ? std::string(env) : std::string("auto"));
    }
    return *g_active;
}

void set_backend(const std::string& name) { g_active = pick(name); }

} // namespace sectorflow::kernels

#include "qdetect/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "qdetect/errors.hpp"

namespace qdetect::kernels {
namespace {

std::atomic<const Backend*> g_active{nullptr};

const Backend* pick(const std::string& name) {
    if (name == "scalar") return &scalar_backend();
    if (name == "avx2") {
        const Backend* b = avx2_backend();
        if (!b) throw Error("avx2 kernels not supported on this CPU");
        return b;
    }
    if (name == "auto") {
        if (const Backend* b = avx2_backend()) return b;
        return &scalar_backend();
    }
    throw Error("unknown kernel backend '" + name + "'");
}

}  // namespace

const Backend& active() {
    const Backend* b = g_active.load(std::memory_order_acquire);
    if (!b) {
        const char* env = std::getenv("QDETECT_KERNELS");
        b = pick(env && *env ? env : "auto");
        g_active.store(b, std::memory_order_release);
    }
    return *b;
}

void force_backend(const char* name) {
    g_active.store(pick(name ? name : "auto"), std::memory_order_release);
}

}  // namespace qdetect::kernels

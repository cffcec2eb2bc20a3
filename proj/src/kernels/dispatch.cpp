#include "fracstab/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace fracstab::kernels {

namespace simd128 {
const Ops& ops();
}
#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
const Ops& ops();
}
#endif

const Ops* simd128_ops() { return &simd128::ops(); }

const Ops* avx2_ops() {
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return &avx2::ops();
#endif
    return nullptr;
}

namespace {

const Ops* pick_auto() {
    if (const Ops* o = avx2_ops()) return o;
    if (const Ops* o = simd128_ops()) return o;
    return &scalar_ops();
}

const Ops* pick(std::string_view name) {
    if (name == "auto" || name.empty()) return pick_auto();
    if (name == "scalar") return &scalar_ops();
    if (name == "simd128") {
        if (const Ops* o = simd128_ops()) return o;
        throw std::runtime_error("kernel variant 'simd128' not available");
    }
    if (name == "avx2") {
        if (const Ops* o = avx2_ops()) return o;
        throw std::runtime_error("kernel variant 'avx2' not available on this CPU");
    }
    throw std::runtime_error("unknown kernel variant '" + std::string(name) +
                             "' (expected auto|scalar|simd128|avx2)");
}

std::atomic<const Ops*> g_active{nullptr};

const Ops* init_from_env() {
    const char* env = std::getenv("FRACSTAB_KERNEL");
    const Ops* o = pick(env ? std::string_view(env) : std::string_view("auto"));
    g_active.store(o, std::memory_order_release);
    return o;
}

}  // namespace

const Ops& active() {
    const Ops* o = g_active.load(std::memory_order_acquire);
    if (!o) o = init_from_env();
    return *o;
}

void force(std::string_view name) {
    g_active.store(pick(name), std::memory_order_release);
}

std::string_view active_name() { return active().name; }

}  // namespace fracstab::kernels

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "armamle/core.hpp"
#include "armamle/kernels.hpp"

namespace armamle::kernels {

namespace {

// -1: automatic, otherwise an Isa value.
std::atomic<int> g_forced{-1};

Isa detect() {
    if (const char* env = std::getenv("ARMAMLE_ISA")) {
        if (std::strcmp(env, "portable") == 0) return Isa::Portable;
    }
    return avx2_supported() ? Isa::Avx2 : Isa::Portable;
}

}  // namespace

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::Portable: return "portable";
        case Isa::Avx2: return "avx2";
    }
    return "unknown";
}

bool avx2_supported() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
    static const bool supported = __builtin_cpu_supports("avx2");
    return supported;
#else
    return false;
#endif
}

Isa active_isa() {
    const int forced = g_forced.load(std::memory_order_relaxed);
    if (forced >= 0) return static_cast<Isa>(forced);
    static const Isa detected = detect();
    return detected;
}

void force_isa(std::optional<Isa> isa) {
    if (isa == Isa::Avx2 && !avx2_supported()) {
        throw Error("AVX2 requested but not supported by this CPU");
    }
    g_forced.store(isa ? static_cast<int>(*isa) : -1, std::memory_order_relaxed);
}

void filter_batch(const SeriesView& series, std::span<const LaneModel> lanes,
                  std::span<FilterSums> out) {
    if (lanes.empty()) return;
    if (lanes.size() > static_cast<std::size_t>(kLanes) || out.size() < lanes.size()) {
        throw DimensionError("filter_batch: bad lane count");
    }
    for (const auto& lane : lanes) {
        if (lane.r != lanes[0].r) throw DimensionError("filter_batch: lanes differ in state size");
    }
    if (active_isa() == Isa::Avx2) {
        filter_batch_avx2(series, lanes, out);
    } else {
        filter_batch_portable(series, lanes, out);
    }
}

}  // namespace armamle::kernels

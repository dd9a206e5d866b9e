#include <atomic>
#include <stdexcept>
#include <string>

#include "fracimp/simd/kernels.hpp"

namespace fracimp::simd {

namespace detail {
#if !defined(FRACIMP_HAVE_AVX2)
const KernelTable* avx2_table() { return nullptr; }
#endif
#if !defined(FRACIMP_HAVE_NEON)
const KernelTable* neon_table() { return nullptr; }
#endif
}  // namespace detail

namespace {

bool cpu_has_avx2() {
#if defined(FRACIMP_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

std::atomic<const KernelTable*>& active_slot() {
    static std::atomic<const KernelTable*> slot{kernels_for(detect_isa())};
    return slot;
}

}  // namespace

const KernelTable* kernels_for(Isa isa) {
    switch (isa) {
        case Isa::Scalar:
            return &scalar_kernels();
        case Isa::Avx2:
            return cpu_has_avx2() ? detail::avx2_table() : nullptr;
        case Isa::Neon:
            return detail::neon_table();
    }
    return nullptr;
}

Isa detect_isa() {
    if (kernels_for(Isa::Avx2) != nullptr) return Isa::Avx2;
    if (kernels_for(Isa::Neon) != nullptr) return Isa::Neon;
    return Isa::Scalar;
}

const KernelTable& active() { return *active_slot().load(std::memory_order_acquire); }

void select(Isa isa) {
    const KernelTable* table = kernels_for(isa);
    if (table == nullptr) throw std::invalid_argument("simd: ISA " + std::string(isa_name(isa)) + " is not available");
    active_slot().store(table, std::memory_order_release);
}

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::Scalar:
            return "scalar";
        case Isa::Avx2:
            return "avx2";
        case Isa::Neon:
            return "neon";
    }
    return "unknown";
}

}  // namespace fracimp::simd

#pragma once

// Inner-loop kernels shared by the quadrature and the solver.
//
// Every kernel has a scalar reference implementation. Vector variants (AVX2+FMA
// on x86-64, NEON on AArch64) are compiled into separate translation units and
// selected once at startup from CPU feature detection. Vector variants
// reassociate sums, so results agree with the scalar reference to within the
// usual n * eps * sum|a_i b_i| bound rather than bitwise.

#include <cstddef>
#include <span>
#include <string_view>

namespace fracimp::simd {

enum class Isa { Scalar, Avx2, Neon };

struct KernelTable {
    Isa isa;
    // sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // max_i v[i]; -inf for n == 0
    double (*max_value)(const double* v, std::size_t n);
    // max_i |a[i] - b[i]|; 0 for n == 0
    double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
};

const KernelTable& scalar_kernels();

/// Kernel table for `isa`, or nullptr when not compiled in or not supported by this CPU.
const KernelTable* kernels_for(Isa isa);

/// Best ISA available on this machine.
Isa detect_isa();

/// Currently selected table. Defaults to detect_isa().
const KernelTable& active();

/// Select a specific ISA; throws std::invalid_argument when unavailable.
void select(Isa isa);

std::string_view isa_name(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

inline double max_value(std::span<const double> v) { return active().max_value(v.data(), v.size()); }

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    return active().max_abs_diff(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

/// RAII override of the active ISA, restoring the previous selection on exit.
class ScopedIsa {
public:
    explicit ScopedIsa(Isa isa) : previous_(active().isa) { select(isa); }
    ~ScopedIsa() { select(previous_); }
    ScopedIsa(const ScopedIsa&) = delete;
    ScopedIsa& operator=(const ScopedIsa&) = delete;

private:
    Isa previous_;
};

namespace detail {
// Defined in the per-ISA translation units when compiled in.
const KernelTable* avx2_table();
const KernelTable* neon_table();
}  // namespace detail

}  // namespace fracimp::simd

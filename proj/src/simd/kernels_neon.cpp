// AArch64 only; NEON is part of the base ISA there.
#include <arm_neon.h>

#include <cmath>
#include <limits>

#include "fracimp/simd/kernels.hpp"

namespace fracimp::simd {

namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double s = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double max_value_neon(const double* v, std::size_t n) {
    double m = -std::numeric_limits<double>::infinity();
    std::size_t i = 0;
    if (n >= 2) {
        float64x2_t acc = vld1q_f64(v);
        for (i = 2; i + 2 <= n; i += 2) acc = vmaxq_f64(acc, vld1q_f64(v + i));
        m = vmaxvq_f64(acc);
    }
    for (; i < n; ++i) m = v[i] > m ? v[i] : m;
    return m;
}

double max_abs_diff_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vmaxq_f64(acc, vabdq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    double m = vmaxvq_f64(acc);
    for (; i < n; ++i) {
        const double d = std::abs(a[i] - b[i]);
        m = d > m ? d : m;
    }
    return m;
}

constexpr KernelTable kNeon{Isa::Neon, dot_neon, max_value_neon, max_abs_diff_neon};

}  // namespace

namespace detail {
const KernelTable* neon_table() { return &kNeon; }
}  // namespace detail

}  // namespace fracimp::simd

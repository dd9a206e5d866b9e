#include <cmath>
#include <limits>

#include "fracimp/simd/kernels.hpp"

namespace fracimp::simd {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double max_value_scalar(const double* v, std::size_t n) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) m = v[i] > m ? v[i] : m;
    return m;
}

double max_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = std::abs(a[i] - b[i]);
        m = d > m ? d : m;
    }
    return m;
}

constexpr KernelTable kScalar{Isa::Scalar, dot_scalar, max_value_scalar, max_abs_diff_scalar};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace fracimp::simd

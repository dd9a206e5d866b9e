#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "fracimp/simd/kernels.hpp"

using namespace fracimp::simd;

namespace {

std::vector<const KernelTable*> available_tables() {
    std::vector<const KernelTable*> out;
    for (const auto isa : {Isa::Scalar, Isa::Avx2, Isa::Neon})
        if (const auto* t = kernels_for(isa)) out.push_back(t);
    return out;
}

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

}  // namespace

TEST_SUITE("simd") {

TEST_CASE("scalar table is always available and detection is consistent") {
    CHECK(kernels_for(Isa::Scalar) == &scalar_kernels());
    const Isa best = detect_isa();
    REQUIRE(kernels_for(best) != nullptr);
    CHECK(kernels_for(best)->isa == best);
    CHECK(active().isa == best);
}

TEST_CASE("vector kernels agree with the scalar reference") {
    std::mt19937_64 rng(11);
    const auto& ref = scalar_kernels();
    for (const auto* table : available_tables()) {
        CAPTURE(isa_name(table->isa));
        for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 64u, 100u, 1000u, 4099u}) {
            CAPTURE(n);
            const auto a = random_vector(rng, n);
            const auto b = random_vector(rng, n);
            double abs_sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) abs_sum += std::abs(a[i] * b[i]);
            const double bound = 4.0 * static_cast<double>(n + 1) * std::numeric_limits<double>::epsilon() * abs_sum;
            CHECK(std::abs(table->dot(a.data(), b.data(), n) - ref.dot(a.data(), b.data(), n)) <= bound);
            CHECK(table->max_value(a.data(), n) == ref.max_value(a.data(), n));
            CHECK(table->max_abs_diff(a.data(), b.data(), n) == ref.max_abs_diff(a.data(), b.data(), n));
        }
    }
}

TEST_CASE("empty inputs follow the documented identities") {
    for (const auto* table : available_tables()) {
        CHECK(table->dot(nullptr, nullptr, 0) == 0.0);
        CHECK(table->max_value(nullptr, 0) == -std::numeric_limits<double>::infinity());
        CHECK(table->max_abs_diff(nullptr, nullptr, 0) == 0.0);
    }
}

TEST_CASE("max kernels see the extreme element at every position") {
    for (const auto* table : available_tables()) {
        for (std::size_t n = 1; n <= 19; ++n) {
            for (std::size_t k = 0; k < n; ++k) {
                std::vector<double> v(n, -2.0), w(n, 0.0);
                v[k] = 5.0;
                w[k] = -3.0;
                CHECK(table->max_value(v.data(), n) == 5.0);
                CHECK(table->max_abs_diff(v.data(), w.data(), n) == 8.0);
            }
        }
    }
}

TEST_CASE("ScopedIsa switches and restores the active table") {
    const Isa before = active().isa;
    {
        ScopedIsa guard(Isa::Scalar);
        CHECK(active().isa == Isa::Scalar);
        const std::vector<double> a{1.0, 2.0, 3.0}, b{4.0, 5.0, 6.0};
        CHECK(dot(a, b) == 32.0);
        CHECK(max_value(a) == 3.0);
        CHECK(max_abs_diff(a, b) == 3.0);
    }
    CHECK(active().isa == before);
}

TEST_CASE("selecting an unavailable ISA throws") {
    for (const auto isa : {Isa::Avx2, Isa::Neon})
        if (!kernels_for(isa)) CHECK_THROWS_AS(select(isa), std::invalid_argument);
}

}

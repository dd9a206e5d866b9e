#include <cmath>
#include <random>

#include "doctest.h"
#include "fracimp/errors.hpp"
#include "fracimp/fracquad.hpp"

using namespace fracimp;

namespace {

std::vector<double> samples_of(const Mesh& mesh, double (*g)(double)) {
    std::vector<double> v(mesh.size());
    for (std::size_t i = 0; i < mesh.size(); ++i) v[i] = g(mesh[i]);
    return v;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_SUITE("fracquad") {

TEST_CASE("row sums reproduce t^alpha / Gamma(alpha + 1) on nonuniform meshes") {
    const std::vector<double> times{0.3, 0.35, 0.8};
    const Mesh mesh = build_mesh(1.0, times, 0.01);
    for (double alpha : {0.1, 0.3, 0.5, 0.8, 0.99}) {
        for (auto scheme : {QuadScheme::Rectangle, QuadScheme::Trapezoid}) {
            const WeightTable w(mesh, alpha, scheme);
            for (std::size_t j = 1; j < mesh.size(); ++j) {
                double s = 0.0;
                for (double x : w.row(j)) s += x;
                CHECK(rel(s, std::pow(mesh[j], alpha) / fracimp::gamma(alpha + 1.0)) <= 1e-12);
            }
        }
    }
}

TEST_CASE("weights are nonnegative") {
    const std::vector<double> times{0.25};
    const Mesh mesh = build_mesh(1.0, times, 1.0 / 200.0);
    for (double alpha : {0.05, 0.5, 0.95}) {
        for (auto scheme : {QuadScheme::Rectangle, QuadScheme::Trapezoid}) {
            const WeightTable w(mesh, alpha, scheme);
            for (std::size_t j = 0; j < mesh.size(); ++j)
                for (double x : w.row(j)) CHECK(x >= -1e-15);
        }
    }
}

TEST_CASE("documented values at t = 1") {
    const Mesh mesh = build_mesh(1.0, {}, 1.0 / 64.0);
    const auto one = samples_of(mesh, [](double) { return 1.0; });
    const auto lin = samples_of(mesh, [](double t) { return t; });
    const WeightTable rect(mesh, 0.5, QuadScheme::Rectangle);
    const WeightTable trap(mesh, 0.5, QuadScheme::Trapezoid);
    const std::size_t J = mesh.last_index();
    CHECK(frac_integral(rect, one, J) == doctest::Approx(1.1283791670955126).epsilon(1e-13));
    CHECK(frac_integral(trap, lin, J) == doctest::Approx(0.7522527780636750).epsilon(1e-12));
}

TEST_CASE("integral at j = 0 is exactly zero") {
    const Mesh mesh = build_mesh(1.0, {}, 0.1);
    const WeightTable w(mesh, 0.4, QuadScheme::Trapezoid);
    const std::vector<double> g(mesh.size(), 123.0);
    CHECK(frac_integral(w, g, 0) == 0.0);
    const std::vector<double> z(mesh.size(), 0.0);
    for (std::size_t j = 0; j < mesh.size(); ++j) CHECK(frac_integral(w, z, j) == 0.0);
    CHECK_THROWS_AS(frac_integral(w, g, mesh.size()), DomainError);
    CHECK_THROWS_AS(frac_integral(w, std::span<const double>(g).first(3), 5), DomainError);
}

TEST_CASE("trapezoid is exact for linear integrands at every node") {
    const std::vector<double> times{0.4};
    const Mesh mesh = build_mesh(2.0, times, 0.01);
    const auto lin = samples_of(mesh, [](double t) { return 3.0 * t - 1.0; });
    for (double alpha : {0.2, 0.5, 0.9}) {
        const WeightTable w(mesh, alpha, QuadScheme::Trapezoid);
        for (std::size_t j = 1; j < mesh.size(); ++j) {
            const double exact = power_rule(3.0, 1.0, alpha, mesh[j]) - power_rule(1.0, 0.0, alpha, mesh[j]);
            CHECK(std::abs(frac_integral(w, lin, j) - exact) <= 1e-10 * std::max(1.0, std::abs(exact)));
        }
    }
}

TEST_CASE("linearity in the samples") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Mesh mesh = build_mesh(1.0, {}, 0.01);
    const WeightTable w(mesh, 0.6, QuadScheme::Trapezoid);
    std::vector<double> g1(mesh.size()), g2(mesh.size()), mix(mesh.size());
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        g1[i] = u(rng);
        g2[i] = u(rng);
        mix[i] = 2.5 * g1[i] - 0.75 * g2[i];
    }
    for (std::size_t j = 0; j < mesh.size(); j += 7) {
        const double lhs = frac_integral(w, mix, j);
        const double rhs = 2.5 * frac_integral(w, g1, j) - 0.75 * frac_integral(w, g2, j);
        CHECK(std::abs(lhs - rhs) <= 1e-13);
    }
}

TEST_CASE("piecewise-continuous integrand uses both limits at impulse nodes") {
    // g = 0 on [0, 0.5], 1 on (0.5, 1]: I^a g(t) = (t - 0.5)^a / Gamma(a + 1) for t > 0.5
    const std::vector<double> times{0.5};
    const Mesh mesh = build_mesh(1.0, times, 1.0 / 64.0);
    std::vector<double> right(mesh.size()), left_imp{0.0};
    for (std::size_t i = 0; i < mesh.size(); ++i) right[i] = mesh[i] >= 0.5 ? 1.0 : 0.0;
    for (auto scheme : {QuadScheme::Rectangle, QuadScheme::Trapezoid}) {
        const WeightTable w(mesh, 0.5, scheme);
        for (std::size_t j = 0; j < mesh.size(); ++j) {
            const double exact = mesh[j] > 0.5 ? std::pow(mesh[j] - 0.5, 0.5) / fracimp::gamma(1.5) : 0.0;
            CHECK(std::abs(frac_integral_pc(w, right, left_imp, j) - exact) <= 1e-13);
        }
    }
}

TEST_CASE("approximate semigroup on g = 1") {
    const Mesh mesh = build_mesh(1.0, {}, 1.0 / 256.0);
    const double h = 1.0 / 256.0;
    const double a = 0.4, b = 0.3;
    for (auto scheme : {QuadScheme::Rectangle, QuadScheme::Trapezoid}) {
        const WeightTable wa(mesh, a, scheme), wb(mesh, b, scheme);
        std::vector<double> one(mesh.size(), 1.0), first(mesh.size());
        for (std::size_t j = 0; j < mesh.size(); ++j) first[j] = frac_integral(wa, one, j);
        for (std::size_t j = 0; j < mesh.size(); j += 16) {
            const double exact = std::pow(mesh[j], a + b) / fracimp::gamma(a + b + 1.0);
            CHECK(std::abs(frac_integral(wb, first, j) - exact) <= 10.0 * h);
        }
    }
}

TEST_CASE("power rule") {
    CHECK(power_rule(1.0, 0.0, 0.5, 1.0) == doctest::Approx(1.1283791670955126).epsilon(1e-14));
    CHECK(power_rule(1.0, 1.0, 0.5, 1.0) == doctest::Approx(0.7522527780636750).epsilon(1e-14));
    CHECK(power_rule(2.0, 2.0, 0.5, 0.5) == doctest::Approx(2.0 * 2.0 / fracimp::gamma(3.5) * std::pow(0.5, 2.5)));
}

TEST_CASE("convergence orders on monomials") {
    const std::vector<double> hs{1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256, 1.0 / 512, 1.0 / 1024};
    const auto rect = convergence_order(QuadScheme::Rectangle, 0.5, expr::parse("t"), 1.0, hs);
    CHECK_FALSE(rect.exact);
    CHECK(rect.order >= 0.9);
    CHECK(rect.order <= 1.2);
    const auto trap_lin = convergence_order(QuadScheme::Trapezoid, 0.5, expr::parse("t"), 1.0, hs);
    CHECK(trap_lin.exact);
    const auto trap_sq = convergence_order(QuadScheme::Trapezoid, 0.5, expr::parse("t^2"), 1.0, hs);
    CHECK(trap_sq.order >= 1.5);
    const auto trap_const = convergence_order(QuadScheme::Rectangle, 0.5, expr::parse("3"), 1.0, hs);
    CHECK(trap_const.exact);
}

TEST_CASE("non-monomial integrands use a fine reference") {
    const std::vector<double> hs{1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
    const auto s = convergence_order(QuadScheme::Rectangle, 0.5, expr::parse("exp(t)"), 1.0, hs);
    CHECK_FALSE(s.exact);
    CHECK(s.order > 0.8);
}

TEST_CASE("insufficient data and node cap") {
    const std::vector<double> two{0.1, 0.05};
    CHECK_THROWS_AS(convergence_order(QuadScheme::Rectangle, 0.5, expr::parse("t"), 1.0, two), DomainError);
    const std::vector<double> h{1.0, 2.0};
    const std::vector<double> e{1.0, 2.0};
    CHECK_THROWS_AS(least_squares_order(h, e), DomainError);
    const Mesh big = build_mesh(1.0, {}, 1.0 / 40000.0);
    CHECK_THROWS_AS(WeightTable(big, 0.5, QuadScheme::Rectangle), RefinementError);
}

TEST_CASE("least-squares slope recovers a power law") {
    const std::vector<double> h{0.1, 0.05, 0.025, 0.0125};
    std::vector<double> e;
    for (double x : h) e.push_back(3.0 * std::pow(x, 1.5));
    CHECK(least_squares_order(h, e) == doctest::Approx(1.5).epsilon(1e-12));
}

}

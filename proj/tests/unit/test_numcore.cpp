#include <cmath>
#include <random>

#include "doctest.h"
#include "fracimp/errors.hpp"
#include "fracimp/numcore.hpp"

using namespace fracimp;

TEST_SUITE("numcore") {

TEST_CASE("gamma matches mpmath at 40 digits") {
    struct Case {
        double x, v;
    };
    for (const auto& c : {Case{0.1, 9.5135076986687313}, Case{0.5, 1.772453850905516}, Case{1.5, 0.88622692545275801},
                          Case{3.7, 4.170651783796604}, Case{10.25, 639232.59877957679},
                          Case{49.5, 8.6676018431352723e+61}}) {
        CAPTURE(c.x);
        CHECK(fracimp::gamma(c.x) == doctest::Approx(c.v).epsilon(1e-13));
    }
}

TEST_CASE("gamma agrees with std::tgamma on [0.1, 50]") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.1, 50.0);
    for (int i = 0; i < 500; ++i) {
        const double x = u(rng);
        CAPTURE(x);
        CHECK(std::abs(fracimp::gamma(x) / std::tgamma(x) - 1.0) < 1e-12);
    }
}

TEST_CASE("gamma recurrence and exact integers") {
    for (int n = 1; n <= 20; ++n) {
        double f = 1.0;
        for (int k = 2; k < n; ++k) f *= k;
        CHECK(fracimp::gamma(n) == doctest::Approx(f).epsilon(1e-14));
    }
    for (double x = 0.15; x < 20.0; x += 0.37) CHECK(fracimp::gamma(x + 1.0) == doctest::Approx(x * fracimp::gamma(x)).epsilon(1e-13));
}

TEST_CASE("gamma rejects nonpositive arguments") {
    CHECK_THROWS_AS(fracimp::gamma(0.0), DomainError);
    CHECK_THROWS_AS(fracimp::gamma(-1.5), DomainError);
    CHECK_THROWS_AS(fracimp::gamma(std::nan("")), DomainError);
}

TEST_CASE("Mittag-Leffler series against mpmath") {
    struct Case {
        double a, z, v;
    };
    for (const auto& c : {Case{0.5, 1.0, 5.0089800807622835}, Case{0.5, -1.0, 0.427583576155807},
                          Case{0.3, -1.0, 0.45659440832969067}, Case{0.8, -1.0, 0.38694857861897685},
                          Case{0.7, 2.5, 57.822398440625332}, Case{0.5, -5.0, 0.11070463773306863},
                          Case{0.9, -10.0, 0.012820606051102103}, Case{0.25, -20.0, 0.039426390446653064},
                          Case{0.9, 30.0, 1.1425102754824526e+19}}) {
        CAPTURE(c.a);
        CAPTURE(c.z);
        CHECK(mittag_leffler(c.a, c.z) == doctest::Approx(c.v).epsilon(1e-12));
    }
    // both branches agree where they meet
    CHECK(mittag_leffler(0.6, -1.0) == doctest::Approx(mittag_leffler(0.6, -1.0 - 1e-12)).epsilon(1e-11));
}

TEST_CASE("Mittag-Leffler special cases") {
    CHECK(mittag_leffler(0.5, -1.0) == doctest::Approx(std::exp(1.0) * std::erfc(1.0)).epsilon(1e-13));
    CHECK(mittag_leffler(1.0, 3.0) == doctest::Approx(std::exp(3.0)).epsilon(1e-13));
    CHECK(mittag_leffler(0.4, 0.0) == 1.0);
}

TEST_CASE("Mittag-Leffler range and domain") {
    CHECK_THROWS_AS(mittag_leffler(0.5, 30.5), RangeError);
    CHECK_THROWS_AS(mittag_leffler(0.5, -31.0), RangeError);
    CHECK_THROWS_AS(mittag_leffler(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(mittag_leffler(1.5, 1.0), DomainError);
    CHECK_THROWS_AS(mittag_leffler(0.5, kMittagLefflerMaxAbsArg), RangeError);  // e^900 overflows
    CHECK(mittag_leffler(0.5, -kMittagLefflerMaxAbsArg) == doctest::Approx(0.018795888861416751).epsilon(1e-12));
    CHECK(mittag_leffler(0.9, -kMittagLefflerMaxAbsArg) == doctest::Approx(0.003713707698459853).epsilon(1e-12));
}

TEST_CASE("Hoelder constant closed forms") {
    CHECK(holder_constant(0.5, 0.25) == doctest::Approx(std::pow(3.0, 0.75)).epsilon(1e-14));
    CHECK(holder_constant(0.75, 0.5) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(holder_constant(1.0, 0.5) == doctest::Approx(1.0));
    CHECK_THROWS_AS(holder_constant(0.5, 0.5), DomainError);
    CHECK_THROWS_AS(holder_constant(0.5, 0.0), DomainError);
    CHECK_THROWS_AS(holder_constant(0.5, 0.7), DomainError);
}

TEST_CASE("Hoelder constant grows as p approaches alpha") {
    double prev = 0.0;
    for (double p = 0.05; p < 0.5; p += 0.05) {
        const double c = holder_constant(0.5, p);
        CHECK(c >= 1.0);
        CHECK(c > prev);
        prev = c;
    }
}

TEST_CASE("L^{1/p} seminorm of closed-form envelopes") {
    CHECK(lp_seminorm(EnvelopeFn::constant(0.1), 0.25, 1.0) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(lp_seminorm(EnvelopeFn::constant(2.0), 0.5, 4.0) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(lp_seminorm(EnvelopeFn::exp_decay(0.5, 1.0), 0.25, 1.0) == doctest::Approx(0.35192326210070687).epsilon(1e-11));
    CHECK(lp_seminorm(EnvelopeFn::exp_decay(0.25, 1.0), 0.3, 1.0) == doctest::Approx(0.17232311988982382).epsilon(1e-11));
    CHECK(lp_seminorm(EnvelopeFn::constant(0.0), 0.3, 2.0) == 0.0);
}

TEST_CASE("sampled envelopes") {
    const auto ramp = EnvelopeFn::sampled({0.0, 1.0}, {0.0, 1.0});
    CHECK(ramp(0.25) == doctest::Approx(0.25));
    // (int_0^1 t^2 dt)^{1/2} = 1/sqrt(3)
    CHECK(lp_seminorm(ramp, 0.5, 1.0) == doctest::Approx(0.5773502691896258).epsilon(1e-11));
    const auto flat = EnvelopeFn::sampled({0.0, 0.5, 1.0}, {0.3, 0.3, 0.3});
    CHECK(lp_seminorm(flat, 0.25, 1.0) == doctest::Approx(lp_seminorm(EnvelopeFn::constant(0.3), 0.25, 1.0)).epsilon(1e-12));
    CHECK_THROWS(EnvelopeFn::sampled({0.1, 1.0}, {1.0, 1.0}));
    CHECK_THROWS(EnvelopeFn::sampled({0.0, 0.0}, {1.0, 1.0}));
    CHECK_THROWS(EnvelopeFn::sampled({0.0, 1.0}, {1.0, -1.0}));
    CHECK_THROWS(lp_seminorm(ramp, 0.5, 2.0));
}

TEST_CASE("envelope scaling and equality") {
    const auto e = EnvelopeFn::exp_decay(0.5, 2.0);
    CHECK(e.scaled(2.0)(0.3) == doctest::Approx(std::exp(-0.6)));
    CHECK(e == EnvelopeFn::exp_decay(0.5, 2.0));
    CHECK_FALSE(e == EnvelopeFn::exp_decay(0.5, 1.0));
    CHECK_FALSE(e == EnvelopeFn::constant(0.5));
    CHECK_THROWS(EnvelopeFn::constant(-1.0));
}

TEST_CASE("seminorm is homogeneous and monotone in the envelope") {
    const auto g = EnvelopeFn::exp_decay(1.0, 0.7);
    for (double p : {0.1, 0.3, 0.45}) {
        const double base = lp_seminorm(g, p, 1.5);
        CHECK(lp_seminorm(g.scaled(3.0), p, 1.5) == doctest::Approx(3.0 * base).epsilon(1e-10));
        CHECK(base <= lp_seminorm(EnvelopeFn::constant(1.0), p, 1.5));
    }
}

}

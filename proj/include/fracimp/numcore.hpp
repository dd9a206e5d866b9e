#pragma once

#include <string>
#include <variant>
#include <vector>

namespace fracimp {

/// Gamma function for x > 0. Relative error below 1e-12 on [0.1, 50].
double gamma(double x);

/// One-parameter Mittag-Leffler function E_alpha(z) = sum z^k / Gamma(alpha k + 1).
/// Direct series summation, except exp(z) for alpha = 1 and a Laplace-type
/// integral for z < -1 where the series cancels. Requires 0 < alpha <= 1 and
/// |z| <= 30; RangeError if the value overflows.
double mittag_leffler(double alpha, double z, double tol = 1e-15);

inline constexpr double kMittagLefflerMaxAbsArg = 30.0;

/// Nonnegative scalar envelope g: [0, T] -> R+.
///
/// Three representations: a constant, a decaying exponential scale * exp(-rate t),
/// or samples on an increasing grid reconstructed piecewise-linearly. Sampled
/// envelopes are only defined on [t.front(), t.back()] and t.front() must be 0.
class EnvelopeFn {
public:
    struct Constant {
        double value;
    };
    struct ExpDecay {
        double scale;
        double rate;
    };
    struct Sampled {
        std::vector<double> t;
        std::vector<double> g;
    };

    static EnvelopeFn constant(double value);
    static EnvelopeFn exp_decay(double scale, double rate);
    static EnvelopeFn sampled(std::vector<double> t, std::vector<double> g);

    double operator()(double t) const;

    /// Right end of the evaluation domain; +inf for closed forms.
    double domain_end() const;

    /// Returns this envelope multiplied pointwise by s >= 0.
    EnvelopeFn scaled(double s) const;

    const std::variant<Constant, ExpDecay, Sampled>& repr() const { return repr_; }

    std::string describe() const;

    friend bool operator==(const EnvelopeFn& a, const EnvelopeFn& b);

private:
    explicit EnvelopeFn(std::variant<Constant, ExpDecay, Sampled> r) : repr_(std::move(r)) {}

    std::variant<Constant, ExpDecay, Sampled> repr_;
};

bool operator==(const EnvelopeFn::Constant& a, const EnvelopeFn::Constant& b);
bool operator==(const EnvelopeFn::ExpDecay& a, const EnvelopeFn::ExpDecay& b);
bool operator==(const EnvelopeFn::Sampled& a, const EnvelopeFn::Sampled& b);

/// (int_0^T g(s)^{1/p} ds)^p, the L^{1/p} seminorm on [0, T].
///
/// Composite Gauss-Legendre with panel doubling until two successive panel
/// counts agree to 1e-10 relative; at most 2^20 quadrature nodes. Constant
/// envelopes short-circuit to value * T^p.
double lp_seminorm(const EnvelopeFn& g, double p, double T);

/// c = ((1 - p) / (alpha - p))^{1 - p}, the constant from Hoelder's inequality
/// with exponents 1/(1-p) and 1/p applied to the kernel (t - s)^{alpha - 1}.
/// Requires 0 < p < alpha <= 1.
double holder_constant(double alpha, double p);

}  // namespace fracimp

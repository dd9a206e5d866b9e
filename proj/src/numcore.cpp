#include "fracimp/numcore.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fracimp/errors.hpp"

namespace fracimp {

namespace {

// Lanczos approximation, g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczosCoeffs = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_gamma(double x) {
    if (x < 0.5) {
        // Reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x)
        return std::numbers::pi / (std::sin(std::numbers::pi * x) * lanczos_gamma(1.0 - x));
    }
    x -= 1.0;
    double a = kLanczosCoeffs[0];
    const double t = x + kLanczosG + 0.5;
    for (std::size_t i = 1; i < kLanczosCoeffs.size(); ++i) a += kLanczosCoeffs[i] / (x + static_cast<double>(i));
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

struct GaussLegendre {
    static constexpr int kOrder = 10;
    std::array<double, kOrder> nodes{};
    std::array<double, kOrder> weights{};

    GaussLegendre() {
        // Newton on P_n with the Chebyshev guess; nodes on [-1, 1].
        constexpr int n = kOrder;
        for (int i = 0; i < n; ++i) {
            double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = pk;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            nodes[static_cast<std::size_t>(i)] = x;
            weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }
};

const GaussLegendre& gauss_legendre() {
    static const GaussLegendre rule;
    return rule;
}

template <class F>
double composite_gl(const F& f, double a, double b, std::size_t panels) {
    const auto& rule = gauss_legendre();
    const double width = (b - a) / static_cast<double>(panels);
    double total = 0.0;
    for (std::size_t k = 0; k < panels; ++k) {
        const double lo = a + width * static_cast<double>(k);
        const double mid = lo + 0.5 * width;
        double s = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(mid + 0.5 * width * rule.nodes[i]);
        total += 0.5 * width * s;
    }
    return total;
}

constexpr std::size_t kMaxQuadratureNodes = std::size_t{1} << 20;

// Panel doubling on [a, b] until successive estimates agree to 1e-10 relative.
template <class F>
double adaptive_gl(const F& f, double a, double b, std::size_t node_budget) {
    const std::size_t per_panel = GaussLegendre::kOrder;
    std::size_t panels = 1;
    double prev = composite_gl(f, a, b, panels);
    while (2 * panels * per_panel <= node_budget) {
        panels *= 2;
        const double cur = composite_gl(f, a, b, panels);
        if (std::abs(cur - prev) <= 1e-10 * std::abs(cur) || cur == prev) return cur;
        prev = cur;
    }
    return prev;
}

// E_alpha(-x) for x > 1, where the alternating series cancels badly. Complete
// monotonicity gives E_alpha(-x) = sin(a pi) / (a pi) int_0^inf e^{-s u^{1/a}} / (u^2 + 2u cos(a pi) + 1) du
// with s = x^{1/a}; the tail [1, inf) is folded onto (0, 1] by u = 1/w.
double mittag_leffler_negative(double alpha, double x) {
    const double s = std::pow(x, 1.0 / alpha);
    const double ca = std::cos(std::numbers::pi * alpha);
    const auto head = [=](double u) { return std::exp(-s * std::pow(u, 1.0 / alpha)) / (u * u + 2.0 * u * ca + 1.0); };
    const auto tail = [=](double w) {
        if (w == 0.0) return 0.0;
        return std::exp(-s * std::pow(w, -1.0 / alpha)) / (1.0 + 2.0 * w * ca + w * w);
    };
    const double integral = adaptive_gl(head, 0.0, 1.0, kMaxQuadratureNodes) + adaptive_gl(tail, 0.0, 1.0, kMaxQuadratureNodes);
    return std::sin(std::numbers::pi * alpha) / (std::numbers::pi * alpha) * integral;
}

}  // namespace

double gamma(double x) {
    if (!(x > 0.0)) {
        std::ostringstream os;
        os << "gamma: argument must be positive, got " << x;
        throw DomainError(os.str());
    }
    return lanczos_gamma(x);
}

double mittag_leffler(double alpha, double z, double tol) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("mittag_leffler: alpha must lie in (0, 1]");
    if (!(tol > 0.0)) throw DomainError("mittag_leffler: tol must be positive");
    if (!(std::abs(z) <= kMittagLefflerMaxAbsArg)) {
        std::ostringstream os;
        os << "mittag_leffler: |z| = " << std::abs(z) << " exceeds supported range " << kMittagLefflerMaxAbsArg;
        throw RangeError(os.str());
    }
    if (z == 0.0) return 1.0;
    if (alpha == 1.0) return std::exp(z);
    if (z < -1.0) return mittag_leffler_negative(alpha, -z);

    const double log_abs_z = std::log(std::abs(z));
    double sum = 1.0;
    for (int k = 1; k < 100000; ++k) {
        const double arg = alpha * k + 1.0;
        double magnitude;
        if (arg <= 50.0) {
            magnitude = std::pow(std::abs(z), k) / gamma(arg);
        } else {
            magnitude = std::exp(k * log_abs_z - std::lgamma(arg));
        }
        const double term = (z < 0.0 && (k % 2 == 1)) ? -magnitude : magnitude;
        sum += term;
        if (!std::isfinite(sum)) throw RangeError("mittag_leffler: series overflow");
        if (magnitude < tol * (1.0 + std::abs(sum))) return sum;
    }
    throw RangeError("mittag_leffler: series did not terminate");
}

EnvelopeFn EnvelopeFn::constant(double value) {
    if (!(value >= 0.0) || !std::isfinite(value)) throw DomainError("envelope: constant must be finite and nonnegative");
    return EnvelopeFn(Constant{value});
}

EnvelopeFn EnvelopeFn::exp_decay(double scale, double rate) {
    if (!(scale >= 0.0) || !std::isfinite(scale) || !std::isfinite(rate))
        throw DomainError("envelope: exponential scale must be finite and nonnegative");
    return EnvelopeFn(ExpDecay{scale, rate});
}

EnvelopeFn EnvelopeFn::sampled(std::vector<double> t, std::vector<double> g) {
    if (t.size() != g.size() || t.size() < 2) throw DomainError("envelope: need at least two (t, g) samples of equal length");
    if (t.front() != 0.0) throw DomainError("envelope: samples must start at t = 0");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1])) throw DomainError("envelope: sample times must be strictly increasing");
    for (double v : g)
        if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("envelope: sample values must be finite and nonnegative");
    return EnvelopeFn(Sampled{std::move(t), std::move(g)});
}

double EnvelopeFn::operator()(double t) const {
    if (!(t >= 0.0) || t > domain_end()) {
        std::ostringstream os;
        os << "envelope: t = " << t << " outside evaluation domain [0, " << domain_end() << "]";
        throw DomainError(os.str());
    }
    return std::visit(
        [t](const auto& r) -> double {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, Constant>) {
                return r.value;
            } else if constexpr (std::is_same_v<R, ExpDecay>) {
                return r.scale * std::exp(-r.rate * t);
            } else {
                const auto it = std::upper_bound(r.t.begin(), r.t.end(), t);
                if (it == r.t.end()) return r.g.back();
                const auto i = static_cast<std::size_t>(it - r.t.begin());
                const double w = (t - r.t[i - 1]) / (r.t[i] - r.t[i - 1]);
                return (1.0 - w) * r.g[i - 1] + w * r.g[i];
            }
        },
        repr_);
}

double EnvelopeFn::domain_end() const {
    if (const auto* s = std::get_if<Sampled>(&repr_)) return s->t.back();
    return std::numeric_limits<double>::infinity();
}

EnvelopeFn EnvelopeFn::scaled(double s) const {
    if (!(s >= 0.0)) throw DomainError("envelope: scale factor must be nonnegative");
    return std::visit(
        [s](const auto& r) -> EnvelopeFn {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, Constant>) {
                return EnvelopeFn::constant(r.value * s);
            } else if constexpr (std::is_same_v<R, ExpDecay>) {
                return EnvelopeFn::exp_decay(r.scale * s, r.rate);
            } else {
                auto g = r.g;
                for (double& v : g) v *= s;
                return EnvelopeFn::sampled(r.t, std::move(g));
            }
        },
        repr_);
}

std::string EnvelopeFn::describe() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(
        [&os](const auto& r) {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, Constant>) {
                os << "constant(" << r.value << ")";
            } else if constexpr (std::is_same_v<R, ExpDecay>) {
                os << r.scale << "*exp(-" << r.rate << "*t)";
            } else {
                os << "sampled(" << r.t.size() << " points on [0, " << r.t.back() << "])";
            }
        },
        repr_);
    return os.str();
}

bool operator==(const EnvelopeFn::Constant& a, const EnvelopeFn::Constant& b) { return a.value == b.value; }
bool operator==(const EnvelopeFn::ExpDecay& a, const EnvelopeFn::ExpDecay& b) {
    return a.scale == b.scale && a.rate == b.rate;
}
bool operator==(const EnvelopeFn::Sampled& a, const EnvelopeFn::Sampled& b) { return a.t == b.t && a.g == b.g; }
bool operator==(const EnvelopeFn& a, const EnvelopeFn& b) { return a.repr_ == b.repr_; }

double lp_seminorm(const EnvelopeFn& g, double p, double T) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("lp_seminorm: p must lie in (0, 1)");
    if (!(T > 0.0)) throw DomainError("lp_seminorm: T must be positive");
    if (T > g.domain_end()) {
        std::ostringstream os;
        os << "lp_seminorm: envelope defined on [0, " << g.domain_end() << "] cannot be evaluated on [0, " << T << "]";
        throw DomainError(os.str());
    }
    if (const auto* c = std::get_if<EnvelopeFn::Constant>(&g.repr())) return c->value * std::pow(T, p);

    const double q = 1.0 / p;
    const auto integrand = [&g, q](double s) { return std::pow(g(s), q); };

    double integral = 0.0;
    if (const auto* s = std::get_if<EnvelopeFn::Sampled>(&g.repr())) {
        // Integrate knot to knot; the reconstruction is smooth in between.
        std::vector<double> breaks{0.0};
        for (double tk : s->t)
            if (tk > 0.0 && tk < T) breaks.push_back(tk);
        breaks.push_back(T);
        const std::size_t budget = std::max<std::size_t>(kMaxQuadratureNodes / (breaks.size() - 1), 2 * GaussLegendre::kOrder);
        for (std::size_t i = 1; i < breaks.size(); ++i) integral += adaptive_gl(integrand, breaks[i - 1], breaks[i], budget);
    } else {
        integral = adaptive_gl(integrand, 0.0, T, kMaxQuadratureNodes);
    }
    return std::pow(integral, p);
}

double holder_constant(double alpha, double p) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("holder_constant: alpha must lie in (0, 1]");
    if (!(p > 0.0 && p < alpha)) {
        std::ostringstream os;
        os << "holder_constant: exponent p = " << p << " must lie in (0, alpha) = (0, " << alpha << ")";
        throw DomainError(os.str());
    }
    return std::pow((1.0 - p) / (alpha - p), 1.0 - p);
}

}  // namespace fracimp

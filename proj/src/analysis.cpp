#include "fracimp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fracimp/errors.hpp"

namespace fracimp {

std::string_view verdict_name(Verdict v) {
    switch (v) {
        case Verdict::ContractionHolds:
            return "contraction_holds";
        case Verdict::ContractionFails:
            return "contraction_fails";
        case Verdict::NotApplicable:
            return "not_applicable";
    }
    return "?";
}

Verdict verdict_for(double gamma_stated) {
    return gamma_stated < 1.0 ? Verdict::ContractionHolds : Verdict::ContractionFails;
}

namespace {

void require_exponent(double alpha, double p) {
    if (!(p > 0.0 && p < alpha)) {
        std::ostringstream os;
        os << "Hoelder exponent p = " << p << " must lie in (0, alpha) = (0, " << alpha << ")";
        throw DomainError(os.str());
    }
}

// c |g|_{1/p} T^{alpha-p}, the common Hoelder estimate of the integral term
// before division by a Gamma factor.
double holder_term(double seminorm_sum, double alpha, double p, double T) {
    return holder_constant(alpha, p) * seminorm_sum * std::pow(T, alpha - p);
}

GammaPair gamma_from(std::size_t m, double l2, double seminorm_sum, double alpha, double p, double T) {
    require_exponent(alpha, p);
    const double jump = static_cast<double>(m) * l2;
    const double term = holder_term(seminorm_sum, alpha, p, T);
    return {jump + term / gamma(alpha + 1.0), jump + term / gamma(alpha)};
}

}  // namespace

Radii a_priori_radii(double x0_norm, double l1, std::size_t m, const EnvelopeFn& M1, const EnvelopeFn& M2,
                     double alpha, double p, double T) {
    require_exponent(alpha, p);
    const double base =
        x0_norm + holder_term(lp_seminorm(M1, p, T) + lp_seminorm(M2, p, T), alpha, p, T) / gamma(alpha);
    Radii r;
    r.lambda.reserve(m + 1);
    for (std::size_t k = 0; k <= m; ++k) r.lambda.push_back(base + static_cast<double>(k) * l1);
    r.max = r.lambda.back();
    return r;
}

GammaPair contraction_gamma1(std::size_t m, double l2, const EnvelopeFn& L1, double alpha, double p, double T) {
    require_exponent(alpha, p);
    return gamma_from(m, l2, lp_seminorm(L1, p, T), alpha, p, T);
}

GammaPair contraction_gamma2(std::size_t m, double l2, const EnvelopeFn& L2, double alpha, double p, double T) {
    require_exponent(alpha, p);
    return gamma_from(m, l2, lp_seminorm(L2, p, T), alpha, p, T);
}

GammaPair contraction_gamma3(std::size_t m, double l2, const EnvelopeFn& L3, const EnvelopeFn& L4, double alpha,
                             double p, double T) {
    require_exponent(alpha, p);
    return gamma_from(m, l2, lp_seminorm(L3, p, T) + lp_seminorm(L4, p, T), alpha, p, T);
}

namespace {

double schaefer_q(const EnvelopeFn& M4, double alpha, double p, double T) {
    require_exponent(alpha, p);
    return holder_term(lp_seminorm(M4, p, T), alpha, p, T) / gamma(alpha);
}

}  // namespace

double schaefer_bound(double phi0_norm, double l1_star, std::size_t m, const EnvelopeFn& M4, double alpha, double p,
                      double T) {
    const double q = schaefer_q(M4, alpha, p, T);
    if (!(q < 1.0)) {
        std::ostringstream os;
        os << "Schaefer bound not applicable: q = c |M4| T^(alpha-p) / Gamma(alpha) = " << q << " >= 1";
        throw BoundNotApplicable(os.str());
    }
    return (phi0_norm + static_cast<double>(m) * l1_star + q) / (1.0 - q);
}

double equicontinuity_modulus(const EnvelopeFn& M2, double alpha, double p, double T) {
    require_exponent(alpha, p);
    return 2.0 * holder_constant(alpha, p) * lp_seminorm(M2, p, T) / gamma(alpha);
}

double logistic_gronwall_bound(double x0_norm, std::size_t m, double l1, double a_star, double b_star, double alpha) {
    if (!(a_star > 0.0 && b_star > 0.0)) throw DomainError("logistic bound: a* and b* must be positive");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("logistic bound: alpha must lie in (0, 1]");
    return (x0_norm + static_cast<double>(m) * l1) * std::exp((a_star + b_star) / gamma(alpha + 1.0));
}

bool Certificate::certified() const {
    if (!bounds_consistent) return false;
    if (verdict == Verdict::ContractionHolds) return true;
    return verdict == Verdict::NotApplicable && schaefer_bound.has_value();
}

Certificate certify(const ProblemSpec& spec, double p) {
    const double alpha = spec.alpha();
    require_exponent(alpha, p);
    const double T = spec.T();
    const auto& imp = spec.impulses();
    const std::size_t m = imp.size();
    const auto& env = spec.rhs().envelopes;
    const double x0_norm = euclidean_norm(spec.x0());
    const EnvelopeFn zero = EnvelopeFn::constant(0.0);

    Certificate cert;
    cert.alpha = alpha;
    cert.p = p;
    cert.T = T;
    cert.m = m;
    cert.c = holder_constant(alpha, p);

    const auto add_check = [&](std::string name, std::string hyp, GammaPair g) {
        cert.checks.push_back({std::move(name), std::move(hyp), g, verdict_for(g.stated)});
    };

    const std::optional<EnvelopeFn>* bound_env = nullptr;  // feeds the radii
    const std::optional<EnvelopeFn>* second_bound = nullptr;
    const std::optional<EnvelopeFn>* modulus_env = nullptr;
    const std::optional<EnvelopeFn>* growth_env = nullptr;  // Schaefer linear growth
    double growth_scale = 1.0;

    switch (spec.rhs().kind()) {
        case RhsKind::Plain:
        case RhsKind::Split:
            bound_env = &env.M1;
            second_bound = &env.M2;
            if (spec.rhs().kind() == RhsKind::Split) modulus_env = &env.M2;
            if (env.L1) add_check("gamma1", "l2, L1", contraction_gamma1(m, imp.l2, *env.L1, alpha, p, T));
            if (env.L1_star) add_check("gamma1*", "l2, L1*", contraction_gamma1(m, imp.l2, *env.L1_star, alpha, p, T));
            break;
        case RhsKind::Delay:
            bound_env = &env.M3;
            modulus_env = &env.M3;
            growth_env = &env.M4;
            if (env.L2) add_check("gamma2", "l2, L2", contraction_gamma2(m, imp.l2, *env.L2, alpha, p, T));
            if (env.L2_star) add_check("gamma2*", "l2, L2*", contraction_gamma2(m, imp.l2, *env.L2_star, alpha, p, T));
            break;
        case RhsKind::GeneralDelay:
            bound_env = &env.M5;
            modulus_env = &env.M5;
            growth_env = &env.M6;
            // 1 + |x| + |x_t| <= 2 (1 + |x_t|) on PC, so M6 enters doubled.
            growth_scale = 2.0;
            if (env.L3 && env.L4)
                add_check("gamma3", "l2, L3, L4", contraction_gamma3(m, imp.l2, *env.L3, *env.L4, alpha, p, T));
            if (env.L3_star && env.L4_star)
                add_check("gamma3*", "l2, L3*, L4*",
                          contraction_gamma3(m, imp.l2, *env.L3_star, *env.L4_star, alpha, p, T));
            break;
    }

    if (!cert.checks.empty()) {
        const auto& primary = cert.checks.front();
        cert.gamma_stated = primary.gamma.stated;
        cert.gamma_proof = primary.gamma.proof;
        cert.verdict = primary.verdict;
    }

    if (bound_env && *bound_env) {
        const EnvelopeFn& second = (second_bound && *second_bound) ? **second_bound : zero;
        cert.radii = a_priori_radii(x0_norm, imp.l1, m, **bound_env, second, alpha, p, T).lambda;
    }
    if (modulus_env && *modulus_env) cert.equicontinuity_coeff = equicontinuity_modulus(**modulus_env, alpha, p, T);

    if (growth_env) {
        if (*growth_env) {
            const EnvelopeFn growth = (*growth_env)->scaled(growth_scale);
            const double l1s = imp.l1_star.value_or(imp.l1);
            if (!imp.l1_star && m > 0) cert.schaefer_note = "l1* not declared; l1 used in its place";
            cert.schaefer_ratio = schaefer_q(growth, alpha, p, T);
            try {
                cert.schaefer_bound = schaefer_bound(x0_norm, l1s, m, growth, alpha, p, T);
            } catch (const BoundNotApplicable& e) {
                cert.schaefer_note = e.what();
            }
        } else {
            cert.schaefer_note = "no linear-growth envelope declared";
        }
    }

    double radius = x0_norm + static_cast<double>(m) * imp.l1 + 1.0;
    if (!cert.radii.empty()) radius = std::max(radius, cert.radii.back());
    if (cert.schaefer_bound) radius = std::max(radius, *cert.schaefer_bound);
    cert.warnings = spot_check_impulses(imp, spec.dim(), radius);
    cert.bounds_consistent = cert.warnings.empty();
    return cert;
}

Certificate certify_auto(const ProblemSpec& spec) {
    const double alpha = spec.alpha();
    std::optional<Certificate> best;
    double best_score = std::numeric_limits<double>::infinity();
    const auto score = [](const Certificate& c) {
        if (c.gamma_stated) return *c.gamma_stated;
        if (c.schaefer_ratio) return *c.schaefer_ratio;
        if (!c.radii.empty()) return c.radii.back();
        return 0.0;
    };
    for (std::size_t i = 0; i < kAutoPGridSize; ++i) {
        const double p = alpha * static_cast<double>(i + 1) / static_cast<double>(kAutoPGridSize + 1);
        Certificate c = certify(spec, p);
        const double s = score(c);
        if (!best || s < best_score) {
            best_score = s;
            best = std::move(c);
        }
    }
    best->auto_p = true;
    return *best;
}

}  // namespace fracimp

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fracimp/numcore.hpp"
#include "fracimp/problem.hpp"

namespace fracimp {

enum class Verdict { ContractionHolds, ContractionFails, NotApplicable };

std::string_view verdict_name(Verdict v);

/// Strict inequality: gamma < 1 holds, anything else fails.
Verdict verdict_for(double gamma_stated);

/// Contraction constant in both normalisations. `stated` divides the integral
/// term by Gamma(alpha + 1), `proof` by Gamma(alpha); stated >= proof.
struct GammaPair {
    double stated;
    double proof;
};

struct Radii {
    std::vector<double> lambda;  // lambda_0 .. lambda_m
    double max;                  // = lambda_m
};

/// lambda_k = |x0| + k l1 + c (|M1|_{1/p} + |M2|_{1/p}) T^{alpha-p} / Gamma(alpha).
Radii a_priori_radii(double x0_norm, double l1, std::size_t m, const EnvelopeFn& M1, const EnvelopeFn& M2,
                     double alpha, double p, double T);

/// m l2 + c |L1|_{1/p} T^{alpha-p} / Gamma(alpha + 1)  (and / Gamma(alpha)).
GammaPair contraction_gamma1(std::size_t m, double l2, const EnvelopeFn& L1, double alpha, double p, double T);

/// Delay variant; identical structure with the delay Lipschitz envelope.
GammaPair contraction_gamma2(std::size_t m, double l2, const EnvelopeFn& L2, double alpha, double p, double T);

/// General-delay variant with two Lipschitz envelopes (state and history).
GammaPair contraction_gamma3(std::size_t m, double l2, const EnvelopeFn& L3, const EnvelopeFn& L4, double alpha,
                             double p, double T);

/// (|phi(0)| + m l1* + q) / (1 - q) with q = c |M4|_{1/p} T^{alpha-p} / Gamma(alpha).
/// Throws BoundNotApplicable when q >= 1.
double schaefer_bound(double phi0_norm, double l1_star, std::size_t m, const EnvelopeFn& M4, double alpha, double p,
                      double T);

/// C with |F2 x(tau2) - F2 x(tau1)| <= C (tau2 - tau1)^{alpha - p}; C = 2 c |M2|_{1/p} / Gamma(alpha).
double equicontinuity_modulus(const EnvelopeFn& M2, double alpha, double p, double T);

/// (|x0| + m l1) exp((a* + b*) / Gamma(alpha + 1)) for the impulsive logistic equation.
double logistic_gronwall_bound(double x0_norm, std::size_t m, double l1, double a_star, double b_star, double alpha);

struct TheoremCheck {
    std::string name;         // e.g. "gamma1", "gamma2*"
    std::string hypotheses;   // envelopes it consumed
    GammaPair gamma{};
    Verdict verdict = Verdict::NotApplicable;
};

struct Certificate {
    double alpha = 0.0;
    double p = 0.0;
    double T = 0.0;
    std::size_t m = 0;
    double c = 0.0;

    // Primary contraction theorem for the right-hand side kind.
    std::optional<double> gamma_stated;
    std::optional<double> gamma_proof;
    Verdict verdict = Verdict::NotApplicable;

    std::vector<TheoremCheck> checks;  // every contraction theorem examined
    std::vector<double> radii;
    std::optional<double> schaefer_bound;
    std::optional<double> schaefer_ratio;  // q; the bound needs q < 1
    std::string schaefer_note;  // why the bound is absent, if it is
    std::optional<double> equicontinuity_coeff;

    bool auto_p = false;
    std::vector<std::string> warnings;  // impulse bound spot-check findings
    bool bounds_consistent = true;

    /// Contraction holds, or (no contraction theorem applies and) the Schaefer
    /// a-priori bound exists; declared impulse bounds must survive the spot-check.
    bool certified() const;
};

/// Dispatches on the right-hand side kind. Missing envelopes leave the
/// matching theorem NotApplicable. Throws DomainError for p outside (0, alpha).
Certificate certify(const ProblemSpec& spec, double p);

inline constexpr std::size_t kAutoPGridSize = 64;

/// Grid p_i = alpha (i + 1) / 65, i < 64; keeps the certificate with the
/// smallest primary gamma_stated (or Schaefer ratio when no contraction applies).
Certificate certify_auto(const ProblemSpec& spec);

}  // namespace fracimp

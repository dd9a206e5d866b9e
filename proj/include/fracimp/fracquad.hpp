#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "fracimp/exprlang.hpp"
#include "fracimp/problem.hpp"

namespace fracimp {

enum class QuadScheme { Rectangle, Trapezoid };

std::string_view scheme_name(QuadScheme s);

inline constexpr std::size_t kMaxQuadratureNodes = std::size_t{1} << 15;

/// Product-integration weights for the Riemann-Liouville integral
///
///   I^alpha g(t_j) = 1/Gamma(alpha) int_0^{t_j} (t_j - s)^{alpha - 1} g(s) ds
///                  ~ sum_{i <= j} w[j][i] g(t_i).
///
/// Rectangle freezes g at the left end of each cell; trapezoid integrates the
/// kernel exactly against the piecewise-linear interpolant. Rows are stored
/// packed lower-triangular. For piecewise-continuous samples the trapezoid
/// rule needs the left limit of g at impulse nodes in addition to the right
/// limit; `end_weight_column` keeps the part of each row that belongs to the
/// cell ending at an impulse node so the two limits can be weighted apart.
class WeightTable {
public:
    WeightTable(const Mesh& mesh, double alpha, QuadScheme scheme);

    double alpha() const { return alpha_; }
    QuadScheme scheme() const { return scheme_; }
    const Mesh& mesh() const { return *mesh_; }
    std::size_t size() const { return n_; }

    /// Weights of row j (length j + 1).
    std::span<const double> row(std::size_t j) const { return {weights_.data() + j * (j + 1) / 2, j + 1}; }

    double weight(std::size_t j, std::size_t i) const { return row(j)[i]; }

    /// For the k-th impulse node i_k and row j >= i_k, the weight of g(t_{i_k}^-)
    /// coming from the cell [t_{i_k - 1}, t_{i_k}] (zero for rectangle).
    double end_weight(std::size_t k, std::size_t j) const;

private:
    const Mesh* mesh_;
    double alpha_;
    QuadScheme scheme_;
    std::size_t n_;
    std::vector<double> weights_;
    std::vector<std::vector<double>> impulse_end_;  // [k][j - i_k]
};

WeightTable build_weights(const Mesh& mesh, double alpha, QuadScheme scheme);

/// sum_{i <= j} w[j][i] samples[i]; exactly 0 at j = 0.
double frac_integral(const WeightTable& table, std::span<const double> samples, std::size_t j);

/// Same for piecewise-continuous g: `right` holds g(t_i^+) (= g(t_i) away from
/// impulses), `left_imp[k]` holds g(t_{i_k}^-) for the k-th impulse node.
double frac_integral_pc(const WeightTable& table, std::span<const double> right, std::span<const double> left_imp,
                        std::size_t j);

/// Closed-form I^alpha of c t^beta: c Gamma(beta + 1) / Gamma(beta + alpha + 1) t^{beta + alpha}.
double power_rule(double coeff, double beta, double alpha, double t);

struct OrderStudy {
    std::vector<double> h;
    std::vector<double> error;
    double order = 0.0;  // least-squares slope of log error vs log h
    bool exact = false;  // every error at roundoff level
};

/// Least-squares slope of log(error) against log(h). Needs three or more points.
double least_squares_order(std::span<const double> h, std::span<const double> error);

/// Empirical order of I^alpha g at time t on uniform meshes with the given steps.
/// Monomials c, c t^k, c*t^k have a closed-form reference; otherwise the
/// reference is computed with the same scheme at min(h) / 8.
OrderStudy convergence_order(QuadScheme scheme, double alpha, const expr::Expr& g, double t,
                             std::span<const double> h_list);

}  // namespace fracimp

#include "fracimp/fracquad.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include "fracimp/errors.hpp"
#include "fracimp/numcore.hpp"
#include "fracimp/simd/kernels.hpp"

namespace fracimp {

std::string_view scheme_name(QuadScheme s) { return s == QuadScheme::Rectangle ? "rectangle" : "trapezoid"; }

namespace {

// Exact moments of the kernel over one cell [a, b] seen from t >= b, with
// A = t - a, delta = (b - a) / A. Written with expm1/log1p so that far cells
// (delta -> 0) keep full relative accuracy.
struct CellWeights {
    double total;  // int (t-s)^{alpha-1} ds / Gamma(alpha)
    double start;  // weight of g(a) under linear interpolation
    double end;    // weight of g(b)
};

CellWeights cell_weights(double A, double delta, double alpha, double inv_g1, double inv_g2) {
    const double a_pow = std::pow(A, alpha);
    const double l = std::log1p(-delta);  // -inf when the cell touches t
    const double total = a_pow * -std::expm1(alpha * l) * inv_g1;
    const double phi = -std::expm1(alpha * l + std::log1p(alpha * delta));
    const double end = a_pow * phi / delta * inv_g2;
    return {total, total - end, end};
}

}  // namespace

WeightTable::WeightTable(const Mesh& mesh, double alpha, QuadScheme scheme)
    : mesh_(&mesh), alpha_(alpha), scheme_(scheme), n_(mesh.size()) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("build_weights: alpha must lie in (0, 1]");
    if (n_ - 1 > kMaxQuadratureNodes) {
        std::ostringstream os;
        os << "build_weights: mesh has " << n_ - 1 << " cells, above the cap of " << kMaxQuadratureNodes;
        throw RefinementError(os.str());
    }
    const double inv_g1 = 1.0 / gamma(alpha + 1.0);
    const double inv_g2 = 1.0 / gamma(alpha + 2.0);
    const auto nodes = mesh.nodes();

    weights_.assign(n_ * (n_ + 1) / 2, 0.0);
    const auto& imp = mesh.impulse_nodes();
    impulse_end_.resize(imp.size());
    for (std::size_t k = 0; k < imp.size(); ++k) impulse_end_[k].assign(n_ - imp[k], 0.0);

    for (std::size_t j = 1; j < n_; ++j) {
        double* w = weights_.data() + j * (j + 1) / 2;
        const double tj = nodes[j];
        for (std::size_t i = 0; i < j; ++i) {
            const double A = tj - nodes[i];
            const double h = nodes[i + 1] - nodes[i];
            const double delta = i + 1 == j ? 1.0 : h / A;
            const CellWeights cw = cell_weights(A, delta, alpha, inv_g1, inv_g2);
            if (scheme == QuadScheme::Rectangle) {
                w[i] += cw.total;
            } else {
                w[i] += cw.start;
                w[i + 1] += cw.end;
            }
        }
        if (scheme == QuadScheme::Trapezoid) {
            for (std::size_t k = 0; k < imp.size(); ++k) {
                const std::size_t ik = imp[k];
                if (ik > j) break;
                const double A = tj - nodes[ik - 1];
                const double h = nodes[ik] - nodes[ik - 1];
                const double delta = ik == j ? 1.0 : h / A;
                impulse_end_[k][j - ik] = cell_weights(A, delta, alpha, inv_g1, inv_g2).end;
            }
        }
    }
}

double WeightTable::end_weight(std::size_t k, std::size_t j) const {
    const std::size_t ik = mesh_->impulse_nodes()[k];
    if (j < ik) return 0.0;
    return impulse_end_[k][j - ik];
}

WeightTable build_weights(const Mesh& mesh, double alpha, QuadScheme scheme) { return WeightTable(mesh, alpha, scheme); }

double frac_integral(const WeightTable& table, std::span<const double> samples, std::size_t j) {
    if (j >= table.size()) throw DomainError("frac_integral: node index out of range");
    if (samples.size() < j + 1) throw DomainError("frac_integral: fewer samples than j + 1");
    if (j == 0) return 0.0;
    return simd::dot(table.row(j), samples.first(j + 1));
}

double frac_integral_pc(const WeightTable& table, std::span<const double> right, std::span<const double> left_imp,
                        std::size_t j) {
    double s = frac_integral(table, right, j);
    if (table.scheme() == QuadScheme::Rectangle) return s;
    const auto& imp = table.mesh().impulse_nodes();
    for (std::size_t k = 0; k < imp.size() && imp[k] <= j; ++k)
        s += table.end_weight(k, j) * (left_imp[k] - right[imp[k]]);
    return s;
}

double power_rule(double coeff, double beta, double alpha, double t) {
    if (t == 0.0) return 0.0;
    return coeff * gamma(beta + 1.0) / gamma(beta + alpha + 1.0) * std::pow(t, beta + alpha);
}

double least_squares_order(std::span<const double> h, std::span<const double> error) {
    if (h.size() < 3 || h.size() != error.size())
        throw DomainError("convergence order: insufficient data (need at least three step sizes)");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double x = std::log(h[i]);
        const double y = std::log(error[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

struct Monomial {
    double coeff;
    double power;
};

std::optional<Monomial> as_monomial(const expr::Node& n) {
    using namespace expr;
    if (const auto* num = std::get_if<Number>(&n.v)) return Monomial{num->value, 0.0};
    if (const auto* var = std::get_if<Variable>(&n.v)) {
        if (var->kind == VarKind::Time) return Monomial{1.0, 1.0};
        return std::nullopt;
    }
    if (const auto* b = std::get_if<Binary>(&n.v)) {
        if (b->op == BinaryOp::Pow) {
            const auto* base = std::get_if<Variable>(&b->lhs->v);
            const auto* exp = std::get_if<Number>(&b->rhs->v);
            if (base && exp && base->kind == VarKind::Time && exp->value > -1.0) return Monomial{1.0, exp->value};
            return std::nullopt;
        }
        if (b->op == BinaryOp::Mul) {
            const auto l = as_monomial(*b->lhs);
            const auto r = as_monomial(*b->rhs);
            if (l && r && (l->power == 0.0 || r->power == 0.0)) return Monomial{l->coeff * r->coeff, l->power + r->power};
        }
    }
    return std::nullopt;
}

double integrate_uniform(QuadScheme scheme, double alpha, const expr::Expr& g, double t, double h) {
    const Mesh mesh = build_mesh(t, {}, h);
    const WeightTable table(mesh, alpha, scheme);
    std::vector<double> samples(mesh.size());
    for (std::size_t i = 0; i < mesh.size(); ++i) samples[i] = expr::eval(g, expr::Bindings().time(mesh[i]));
    return frac_integral(table, samples, mesh.last_index());
}

}  // namespace

OrderStudy convergence_order(QuadScheme scheme, double alpha, const expr::Expr& g, double t,
                             std::span<const double> h_list) {
    if (h_list.size() < 3) throw DomainError("convergence order: insufficient data (need at least three step sizes)");
    double reference;
    if (const auto mono = as_monomial(g.root())) {
        reference = power_rule(mono->coeff, mono->power, alpha, t);
    } else {
        double h_min = h_list[0];
        for (double h : h_list) h_min = std::min(h_min, h);
        reference = integrate_uniform(scheme, alpha, g, t, h_min / 8.0);
    }
    OrderStudy study;
    study.exact = true;
    for (double h : h_list) {
        const double err = std::abs(integrate_uniform(scheme, alpha, g, t, h) - reference);
        study.h.push_back(h);
        study.error.push_back(err);
        if (err > 1e-13 * std::max(1.0, std::abs(reference))) study.exact = false;
    }
    study.order = study.exact ? std::nan("") : least_squares_order(study.h, study.error);
    return study;
}

}  // namespace fracimp

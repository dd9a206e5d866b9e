#include "fracimp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "fracimp/errors.hpp"
#include "fracimp/simd/kernels.hpp"

namespace fracimp {

std::string_view method_name(SolveMethod m) { return m == SolveMethod::Picard ? "picard" : "marching"; }

namespace {

void check_mesh(const ProblemSpec& spec, const Mesh& mesh) {
    const auto& times = spec.impulses().times;
    const auto& nodes = mesh.impulse_nodes();
    bool ok = mesh.T() == spec.T() && nodes.size() == times.size();
    for (std::size_t k = 0; ok && k < times.size(); ++k) ok = mesh[nodes[k]] == times[k];
    if (!ok) throw ValidationError("mesh was not built for this problem (horizon or impulse nodes differ)");
}

// Iterate storage plus everything needed to evaluate f at a node.
class Workspace {
    const ProblemSpec& spec_;
    const Mesh& mesh_;
    std::size_t d_, n_, m_;

public:
    Workspace(const ProblemSpec& spec, const Mesh& mesh)
        : spec_(spec),
          mesh_(mesh),
          d_(spec.dim()),
          n_(mesh.size()),
          m_(mesh.impulse_nodes().size()),
          left(n_ * d_),
          right(m_ * d_),
          left_norm(n_),
          right_norm(m_),
          xr_(d_) {
        if (spec.delay()) window_.emplace(mesh, *spec.delay(), d_);
    }

    std::size_t dim() const { return d_; }
    std::size_t nodes() const { return n_; }
    std::size_t impulses() const { return m_; }

    PcView view() const { return PcView{&mesh_, d_, left, right}; }

    std::span<double> left_at(std::size_t i) { return std::span<double>(left).subspan(i * d_, d_); }
    std::span<double> right_at(std::size_t k) { return std::span<double>(right).subspan(k * d_, d_); }

    void refresh_left_norm(std::size_t i) { left_norm[i] = euclidean_norm(left_at(i)); }
    void refresh_right_norm(std::size_t k) { right_norm[k] = euclidean_norm(right_at(k)); }
    void refresh_norms() {
        if (!window_) return;
        for (std::size_t i = 0; i < n_; ++i) refresh_left_norm(i);
        for (std::size_t k = 0; k < m_; ++k) refresh_right_norm(k);
    }
    bool tracks_norms() const { return window_.has_value(); }

    /// f(t_i, x(t_i^side), x(t_i - r), |x_{t_i}|) into out.
    void rhs(std::size_t i, Side side, std::span<double> out) {
        RhsContext ctx;
        ctx.t = mesh_[i];
        const PcView v = view();
        ctx.x = v.at(i, side);
        try {
            if (window_) {
                window_->delayed_value(v, i, side, xr_);
                ctx.xr = xr_;
                ctx.xtsup = window_->sup_norm(v, left_norm, right_norm, i, side);
            }
            spec_.rhs().evaluate(ctx, out);
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << "right-hand side failed at node " << i << " (t = " << ctx.t
               << (side == Side::Right ? ", right limit" : "") << "): " << e.what();
            throw SolveError(os.str());
        }
    }

    void jump(std::size_t k, std::span<const double> x, std::span<double> out) const {
        try {
            spec_.impulses().jumps[k](x, out);
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << "impulse map " << k + 1 << " failed at t = " << spec_.impulses().times[k] << ": " << e.what();
            throw SolveError(os.str());
        }
    }

    std::vector<double> left;
    std::vector<double> right;
    std::vector<double> left_norm;
    std::vector<double> right_norm;

private:
    std::optional<HistoryWindow> window_;
    State xr_;
};

// f samples in component-major layout: right[c * n + i], left_imp[c * m + k].
struct Samples {
    std::vector<double> right;
    std::vector<double> left_imp;

    Samples(std::size_t d, std::size_t n, std::size_t m) : right(d * n, 0.0), left_imp(d * m, 0.0) {}
};

void sample_all(Workspace& ws, const Mesh& mesh, Samples& s) {
    const std::size_t d = ws.dim(), n = ws.nodes(), m = ws.impulses();
    State f(d);
    for (std::size_t i = 0; i < n; ++i) {
        ws.rhs(i, Side::Right, f);
        for (std::size_t c = 0; c < d; ++c) s.right[c * n + i] = f[c];
        if (const auto k = mesh.impulse_index(i)) {
            ws.rhs(i, Side::Left, f);
            for (std::size_t c = 0; c < d; ++c) s.left_imp[c * m + *k] = f[c];
        }
    }
}

double integral(const WeightTable& table, const Samples& s, std::size_t c, std::size_t n, std::size_t m,
                std::size_t j) {
    const std::span<const double> right(s.right.data() + c * n, n);
    const std::span<const double> left(s.left_imp.data() + c * m, m);
    return frac_integral_pc(table, right, left, j);
}

// x(t_j) = (x0 + accumulated jumps) + integral, left to right; jumps read the
// freshly computed left limits.
template <class IntegralAt>
void assemble(Workspace& ws, const ProblemSpec& spec, const Mesh& mesh, IntegralAt&& integral_at) {
    const std::size_t d = ws.dim(), n = ws.nodes();
    State acc = spec.x0();
    State jmp(d);
    for (std::size_t j = 0; j < n; ++j) {
        auto x = ws.left_at(j);
        for (std::size_t c = 0; c < d; ++c) x[c] = acc[c] + integral_at(c, j);
        if (const auto k = mesh.impulse_index(j)) {
            ws.jump(*k, x, jmp);
            auto xr = ws.right_at(*k);
            for (std::size_t c = 0; c < d; ++c) {
                xr[c] = x[c] + jmp[c];
                acc[c] += jmp[c];
            }
        }
    }
}

double update_norm(const std::vector<double>& a, const std::vector<double>& b, std::size_t d) {
    if (d == 1) return simd::max_abs_diff(a, b);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); i += d) {
        double s = 0.0;
        for (std::size_t c = 0; c < d; ++c) s += (a[i + c] - b[i + c]) * (a[i + c] - b[i + c]);
        worst = std::max(worst, std::sqrt(s));
    }
    return worst;
}

Trajectory to_trajectory(const Mesh& mesh, Workspace& ws) {
    return Trajectory(mesh, ws.dim(), std::move(ws.left), std::move(ws.right));
}

}  // namespace

SolveReport solve_picard(const ProblemSpec& spec, const Mesh& mesh, const SolveOptions& options) {
    check_mesh(spec, mesh);
    if (!(options.tol > 0.0)) throw ValidationError("tolerance must be positive");
    const WeightTable table(mesh, spec.alpha(), options.scheme);
    Workspace ws(spec, mesh);
    const std::size_t d = ws.dim(), n = ws.nodes(), m = ws.impulses();

    assemble(ws, spec, mesh, [](std::size_t, std::size_t) { return 0.0; });
    ws.refresh_norms();

    Samples samples(d, n, m);
    std::vector<double> prev_left, prev_right;
    SolveReport report{Trajectory(mesh, d, std::vector<double>(n * d), std::vector<double>(m * d)), 0, 0.0,
                       false, options.scheme, SolveMethod::Picard, {}};
    report.scheme = options.scheme;
    report.method = SolveMethod::Picard;

    for (std::size_t it = 1; it <= options.max_iter; ++it) {
        sample_all(ws, mesh, samples);
        prev_left = ws.left;
        prev_right = ws.right;
        assemble(ws, spec, mesh, [&](std::size_t c, std::size_t j) { return integral(table, samples, c, n, m, j); });
        ws.refresh_norms();

        const double r = std::max(update_norm(ws.left, prev_left, d), update_norm(ws.right, prev_right, d));
        report.residuals.push_back(r);
        report.iterations = it;
        report.final_residual = r;
        if (!std::isfinite(r)) break;
        if (r <= options.tol) {
            report.converged = true;
            break;
        }
    }
    report.trajectory = to_trajectory(mesh, ws);
    return report;
}

SolveReport solve_marching(const ProblemSpec& spec, const Mesh& mesh, const SolveOptions& options) {
    check_mesh(spec, mesh);
    if (!(options.tol > 0.0)) throw ValidationError("tolerance must be positive");
    const bool trapezoid = options.scheme == QuadScheme::Trapezoid;
    const WeightTable rect(mesh, spec.alpha(), QuadScheme::Rectangle);
    std::optional<WeightTable> trap;
    if (trapezoid) trap.emplace(mesh, spec.alpha(), QuadScheme::Trapezoid);

    Workspace ws(spec, mesh);
    const std::size_t d = ws.dim(), n = ws.nodes(), m = ws.impulses();
    Samples samples(d, n, m);
    State acc = spec.x0(), f(d), jmp(d), base(d), partial(d);
    const double step_tol = 1e-3 * options.tol;

    std::copy(spec.x0().begin(), spec.x0().end(), ws.left_at(0).begin());
    if (ws.tracks_norms()) ws.refresh_left_norm(0);
    ws.rhs(0, Side::Right, f);
    for (std::size_t c = 0; c < d; ++c) samples.right[c * n] = f[c];

    SolveReport report{Trajectory(mesh, d, std::vector<double>(n * d), std::vector<double>(m * d)), 0, 0.0,
                       false, options.scheme, SolveMethod::Picard, {}};
    report.scheme = options.scheme;
    report.method = SolveMethod::Marching;
    report.iterations = 1;
    report.converged = true;

    for (std::size_t j = 1; j < n; ++j) {
        auto x = ws.left_at(j);
        const auto k = mesh.impulse_index(j);
        for (std::size_t c = 0; c < d; ++c) x[c] = acc[c] + integral(rect, samples, c, n, m, j);
        if (ws.tracks_norms()) ws.refresh_left_norm(j);

        if (trapezoid) {
            // Samples at j are still zero, so this is the row without its last term.
            for (std::size_t c = 0; c < d; ++c) partial[c] = integral(*trap, samples, c, n, m, j);
            const double w_jj = trap->weight(j, j);
            bool settled = false;
            for (std::size_t it = 0; it < options.max_iter; ++it) {
                ws.rhs(j, Side::Left, f);
                double move = 0.0;
                for (std::size_t c = 0; c < d; ++c) {
                    const double next = acc[c] + (partial[c] + w_jj * f[c]);
                    move = std::max(move, std::abs(next - x[c]));
                    x[c] = next;
                }
                if (ws.tracks_norms()) ws.refresh_left_norm(j);
                if (move <= step_tol) {
                    settled = true;
                    break;
                }
            }
            if (!settled) report.converged = false;
        }

        if (k) {
            ws.jump(*k, x, jmp);
            auto xr = ws.right_at(*k);
            for (std::size_t c = 0; c < d; ++c) {
                xr[c] = x[c] + jmp[c];
                acc[c] += jmp[c];
            }
            if (ws.tracks_norms()) ws.refresh_right_norm(*k);
            ws.rhs(j, Side::Left, f);
            for (std::size_t c = 0; c < d; ++c) samples.left_imp[c * m + *k] = f[c];
        }
        ws.rhs(j, Side::Right, f);
        for (std::size_t c = 0; c < d; ++c) samples.right[c * n + j] = f[c];
    }
    report.trajectory = to_trajectory(mesh, ws);
    return report;
}

SolveReport solve(const ProblemSpec& spec, const Mesh& mesh, SolveMethod method, const SolveOptions& options) {
    return method == SolveMethod::Picard ? solve_picard(spec, mesh, options) : solve_marching(spec, mesh, options);
}

double jump_residual(const Trajectory& traj, const ProblemSpec& spec) {
    const auto& imp = spec.impulses();
    const auto& nodes = traj.mesh().impulse_nodes();
    if (nodes.size() != imp.size()) throw ValidationError("jump_residual: trajectory mesh does not match the schedule");
    const std::size_t d = traj.dim();
    State jmp(d), diff(d);
    double worst = 0.0;
    for (std::size_t k = 0; k < imp.size(); ++k) {
        const auto left = traj.left_limit(nodes[k]);
        const auto right = traj.right_limit(nodes[k]);
        imp.jumps[k](left, jmp);
        for (std::size_t c = 0; c < d; ++c) diff[c] = right[c] - left[c] - jmp[c];
        worst = std::max(worst, euclidean_norm(diff));
    }
    return worst;
}

std::vector<double> f2_integral(const ProblemSpec& spec, const Trajectory& traj, QuadScheme scheme) {
    if (spec.rhs().kind() != RhsKind::Split) throw ValidationError("f2_integral: right-hand side is not split");
    const Mesh& mesh = traj.mesh();
    const WeightTable table(mesh, spec.alpha(), scheme);
    const std::size_t d = traj.dim(), n = mesh.size(), m = mesh.impulse_nodes().size();
    Samples s(d, n, m);
    State f(d);
    const PcView v = traj.view();
    for (std::size_t i = 0; i < n; ++i) {
        RhsContext ctx;
        ctx.t = mesh[i];
        ctx.x = v.at(i, Side::Right);
        spec.rhs().evaluate_f2(ctx, f);
        for (std::size_t c = 0; c < d; ++c) s.right[c * n + i] = f[c];
        if (const auto k = mesh.impulse_index(i)) {
            ctx.x = v.at(i, Side::Left);
            spec.rhs().evaluate_f2(ctx, f);
            for (std::size_t c = 0; c < d; ++c) s.left_imp[c * m + *k] = f[c];
        }
    }
    std::vector<double> out(n * d);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t c = 0; c < d; ++c) out[j * d + c] = integral(table, s, c, n, m, j);
    return out;
}

}  // namespace fracimp

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "fracimp/cli.hpp"

namespace fracimp::cli {

namespace {

std::string num(double v) {
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << content;
    if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

// a * x + b when the expression is affine in the single state component and
// free of t; constant subtrees are folded by evaluation.
struct Affine {
    double a;
    double b;
};

std::optional<Affine> affine(const expr::Expr& e) {
    const auto use = expr::variables(e);
    if (use.kinds.empty()) return Affine{0.0, expr::eval(e, expr::Bindings{})};
    if (use.kinds != std::set<expr::VarKind>{expr::VarKind::State} || use.max_state_component != 1)
        return std::nullopt;
    const auto& v = e.root().v;
    if (std::holds_alternative<expr::Variable>(v)) return Affine{1.0, 0.0};
    if (const auto* n = std::get_if<expr::Negate>(&v)) {
        const auto s = affine(expr::Expr(n->operand));
        if (!s) return std::nullopt;
        return Affine{-s->a, -s->b};
    }
    const auto* bin = std::get_if<expr::Binary>(&v);
    if (!bin) return std::nullopt;
    const auto l = affine(expr::Expr(bin->lhs));
    const auto r = affine(expr::Expr(bin->rhs));
    if (!l || !r) return std::nullopt;
    switch (bin->op) {
        case expr::BinaryOp::Add:
            return Affine{l->a + r->a, l->b + r->b};
        case expr::BinaryOp::Sub:
            return Affine{l->a - r->a, l->b - r->b};
        case expr::BinaryOp::Mul:
            if (l->a == 0.0) return Affine{l->b * r->a, l->b * r->b};
            if (r->a == 0.0) return Affine{r->b * l->a, r->b * l->b};
            return std::nullopt;
        case expr::BinaryOp::Div:
            if (r->a == 0.0 && r->b != 0.0) return Affine{l->a / r->b, l->b / r->b};
            return std::nullopt;
        case expr::BinaryOp::Pow:
            break;
    }
    return std::nullopt;
}

State final_state(const SolveReport& rep) {
    const auto& traj = rep.trajectory;
    const auto x = traj.left_limit(traj.mesh().last_index());
    return State(x.begin(), x.end());
}

double distance(const State& a, const State& b) {
    State d(a.size());
    for (std::size_t c = 0; c < a.size(); ++c) d[c] = a[c] - b[c];
    return euclidean_norm(d);
}

struct Overrides {
    std::string config;
    std::string out;
    std::string report;
    std::string method;
    std::string scheme;
    std::string integrand;
    std::vector<double> h_list;
    std::string example;
};

void apply(RunConfig& cfg, const Overrides& o) {
    if (o.method == "picard") cfg.numerics.method = SolveMethod::Picard;
    if (o.method == "marching") cfg.numerics.method = SolveMethod::Marching;
    if (o.scheme == "rectangle") cfg.numerics.scheme = QuadScheme::Rectangle;
    if (o.scheme == "trapezoid") cfg.numerics.scheme = QuadScheme::Trapezoid;
}

Mesh mesh_for(const ProblemSpec& spec, double h) {
    try {
        return build_mesh(spec, h);
    } catch (const RefinementError& e) {
        throw ConfigError("numerics.target_h", e.what());
    }
}

SolveOptions options_of(const NumericsConfig& n) { return SolveOptions{n.scheme, n.tol, n.max_iter}; }

int cmd_solve(const Overrides& o, std::ostream& out, std::ostream& err) {
    RunConfig cfg = load_config(o.config);
    apply(cfg, o);
    const ProblemSpec spec = build_spec(cfg);
    const Mesh mesh = mesh_for(spec, cfg.numerics.target_h);
    SolveReport rep = [&] {
        try {
            return solve(spec, mesh, cfg.numerics.method, options_of(cfg.numerics));
        } catch (const RefinementError& e) {
            throw ConfigError("numerics.target_h", e.what());
        }
    }();

    const std::string csv = trajectory_csv(rep.trajectory);
    const std::string csv_path = !o.out.empty() ? o.out : cfg.output.csv.value_or("");
    if (csv_path.empty())
        out << csv;
    else
        write_file(csv_path, csv);
    std::ostream& log = csv_path.empty() ? err : out;

    double sup = 0.0;
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        sup = std::max(sup, euclidean_norm(rep.trajectory.left_limit(i)));
        if (mesh.impulse_index(i)) sup = std::max(sup, euclidean_norm(rep.trajectory.right_limit(i)));
    }
    const double jr = jump_residual(rep.trajectory, spec);

    std::ostringstream summary;
    summary << method_name(rep.method) << "/" << scheme_name(rep.scheme) << ": " << mesh.size() << " nodes, "
            << rep.iterations << " iteration(s), residual " << num(rep.final_residual) << ", "
            << (rep.converged ? "converged" : "NOT converged") << "\n"
            << "max |x| " << num(sup) << ", jump residual " << num(jr) << "\n";
    log << summary.str();

    const std::string report_path = !o.report.empty() ? o.report : cfg.output.report.value_or("");
    if (!report_path.empty()) {
        std::ostringstream r;
        r << "solve report\n"
          << "config          " << o.config << "\n"
          << "kind            " << rhs_kind_name(spec.rhs().kind()) << "\n"
          << "alpha           " << num(spec.alpha()) << "\n"
          << "T               " << num(spec.T()) << "\n"
          << "dimension       " << spec.dim() << "\n"
          << "impulses        " << spec.impulses().size() << "\n"
          << "target h        " << num(cfg.numerics.target_h) << "\n"
          << "min step        " << num(mesh.min_step()) << "\n"
          << "tolerance       " << num(cfg.numerics.tol) << "\n"
          << summary.str();
        if (!rep.residuals.empty()) {
            r << "residuals      ";
            for (const double v : rep.residuals) r << " " << num(v);
            r << "\n";
        }
        write_file(report_path, r.str());
    }
    return rep.converged ? kExitOk : kExitNotConverged;
}

int cmd_check(const Overrides& o, std::ostream& out) {
    RunConfig cfg = load_config(o.config);
    const ProblemSpec spec = build_spec(cfg);
    const std::optional<double> p = cfg.certificate ? cfg.certificate->p : std::nullopt;
    Certificate cert = [&] {
        try {
            return p ? certify(spec, *p) : certify_auto(spec);
        } catch (const DomainError& e) {
            throw ConfigError("certificate.p", e.what());
        }
    }();
    const std::string text = certificate_report(cert, cfg, spec.rhs().kind());
    const std::string path = !o.report.empty() ? o.report : cfg.output.report.value_or("");
    if (path.empty()) {
        out << text;
    } else {
        write_file(path, text);
        out << "verdict " << verdict_name(cert.verdict) << "\n";
    }
    return cert.verdict == Verdict::ContractionHolds && cert.bounds_consistent ? kExitOk : kExitCertificateFails;
}

int cmd_order(const Overrides& o, std::ostream& out, std::ostream& err) {
    if (o.h_list.size() < 3) {
        err << "order: --h-list needs at least three step sizes\n";
        return kExitConfig;
    }
    RunConfig cfg = load_config(o.config);
    apply(cfg, o);
    OrderTable table;
    if (!o.integrand.empty()) {
        const expr::Expr g = [&] {
            try {
                return expr::parse(o.integrand);
            } catch (const ParseError& e) {
                throw ConfigError("--integrand", e.what());
            }
        }();
        const OrderStudy s = convergence_order(cfg.numerics.scheme, cfg.problem.alpha, g, cfg.problem.T, o.h_list);
        for (std::size_t i = 0; i < s.h.size(); ++i) table.rows.push_back({s.h[i], s.error[i]});
        table.order = s.order;
        table.exact = s.exact;
        table.reference = "fractional integral of " + expr::to_string(g) + " at t = " + num(cfg.problem.T);
    } else {
        table = solver_order(cfg, o.h_list);
    }
    out << "# reference: " << table.reference << "\n"
        << "# scheme: " << scheme_name(cfg.numerics.scheme) << "\n"
        << "h,error\n";
    for (const auto& row : table.rows) out << num(row.h) << "," << num(row.error) << "\n";
    if (table.exact)
        out << "order: exact\n";
    else
        out << "order: " << num(table.order) << "\n";
    return kExitOk;
}

int cmd_example(const Overrides& o, std::ostream& out) {
    const std::string text = serialize_config(example_config(o.example));
    if (o.out.empty())
        out << text;
    else
        write_file(o.out, text);
    return kExitOk;
}

}  // namespace

std::string trajectory_csv(const Trajectory& traj) {
    const Mesh& mesh = traj.mesh();
    std::string s = "t,side";
    for (std::size_t c = 0; c < traj.dim(); ++c) s += ",x" + std::to_string(c + 1);
    s += "\n";
    const auto row = [&](std::size_t i, const char* side, std::span<const double> x) {
        s += num(mesh[i]);
        s += ',';
        s += side;
        for (const double v : x) {
            s += ',';
            s += num(v);
        }
        s += '\n';
    };
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        if (mesh.impulse_index(i)) {
            row(i, "left", traj.left_limit(i));
            row(i, "right", traj.right_limit(i));
        } else {
            row(i, "both", traj.left_limit(i));
        }
    }
    return s;
}

std::string certificate_report(const Certificate& cert, const RunConfig& config, RhsKind kind) {
    std::ostringstream r;
    const auto line = [&](const std::string& key, const std::string& value) {
        r << key << std::string(key.size() < 16 ? 16 - key.size() : 1, ' ') << value << "\n";
    };
    r << "certificate report\n";
    line("kind", std::string(rhs_kind_name(kind)));
    line("alpha", num(cert.alpha));
    line("T", num(cert.T));
    line("impulses", std::to_string(cert.m));
    line("p", num(cert.p) + (cert.auto_p ? " (auto, minimizer over 64-point grid)" : ""));
    line("c", num(cert.c));
    if (cert.checks.empty()) {
        line("contraction", "not_applicable (no Lipschitz envelope declared)");
    }
    for (const auto& chk : cert.checks) {
        line(chk.name, "stated " + num(chk.gamma.stated) + " (Gamma(alpha+1)), proof " + num(chk.gamma.proof) +
                           " (Gamma(alpha)), " + std::string(verdict_name(chk.verdict)) + " [" + chk.hypotheses +
                           "]");
    }
    if (!cert.radii.empty()) {
        std::string s;
        for (std::size_t k = 0; k < cert.radii.size(); ++k)
            s += (k ? ", " : "") + ("lambda_" + std::to_string(k) + " = ") + num(cert.radii[k]);
        line("radii", s);
    }
    if (cert.schaefer_ratio) line("schaefer q", num(*cert.schaefer_ratio));
    if (cert.schaefer_bound)
        line("schaefer bound", num(*cert.schaefer_bound));
    if (!cert.schaefer_note.empty()) line("schaefer note", cert.schaefer_note);
    if (cert.equicontinuity_coeff)
        line("equicontinuity", num(*cert.equicontinuity_coeff) + " * (t2 - t1)^" + num(cert.alpha - cert.p));

    std::vector<std::string> warnings = cert.warnings;
    if (config.certificate && config.certificate->gronwall) {
        const auto& g = *config.certificate->gronwall;
        const auto bounds = impulse_bounds(config.problem);
        const double x0 = config.problem.x0 ? euclidean_norm(*config.problem.x0) : 0.0;
        line("gronwall bound", num(logistic_gronwall_bound(x0, cert.m, bounds.l1, g.a_max, g.b_max, cert.alpha)) +
                                   " (a* = " + num(g.a_max) + ", b* = " + num(g.b_max) + ")");
        const auto& rhs = config.problem.rhs;
        if (rhs.builtin && *rhs.builtin == "logistic") {
            for (const auto& [name, limit] : {std::pair{"a", g.a_max}, std::pair{"b", g.b_max}}) {
                const expr::Expr& e = rhs.params.at(name);
                for (int i = 0; i <= 100; ++i) {
                    const double t = config.problem.T * i / 100.0;
                    const double v = expr::eval(e, expr::Bindings{}.time(t));
                    if (!(v > 0.0 && v <= limit)) {
                        warnings.push_back(std::string(name) + "(" + num(t) + ") = " + num(v) + " outside (0, " +
                                           num(limit) + "]");
                        break;
                    }
                }
            }
        }
    }
    line("spot-check", warnings.empty() ? "ok" : std::to_string(warnings.size()) + " violation(s)");
    for (const auto& w : warnings) r << "  " << w << "\n";

    std::string existence = "not certified";
    if (cert.verdict == Verdict::ContractionHolds)
        existence = "unique solution (contraction)";
    else if (cert.schaefer_bound)
        existence = "solution exists (Schaefer a-priori bound)";
    line("existence", cert.bounds_consistent ? existence : existence + ", but declared bounds failed the spot-check");
    line("verdict", std::string(verdict_name(cert.verdict)));
    return r.str();
}

OrderTable solver_order(const RunConfig& config, const std::vector<double>& h_list) {
    if (h_list.size() < 3) throw ConfigError("--h-list", "insufficient data (need at least three step sizes)");
    const ProblemSpec spec = build_spec(config);
    const SolveOptions opts = options_of(config.numerics);
    const auto x_at_T = [&](double h) {
        const Mesh mesh = mesh_for(spec, h);
        return final_state(solve(spec, mesh, config.numerics.method, opts));
    };

    OrderTable table;
    std::optional<State> ref;
    const auto& p = config.problem;
    if (spec.rhs().kind() == RhsKind::Plain && spec.dim() == 1 && spec.impulses().empty()) {
        if (const auto aff = affine(p.rhs.f.front())) {
            const double x0 = spec.x0().front(), a = spec.alpha(), T = spec.T();
            if (aff->a == 0.0) {
                ref = State{x0 + aff->b * std::pow(T, a) / gamma(a + 1.0)};
                table.reference = "closed form x0 + c T^alpha / Gamma(alpha + 1)";
            } else if (aff->b == 0.0 && std::abs(aff->a * std::pow(T, a)) <= kMittagLefflerMaxAbsArg) {
                ref = State{x0 * mittag_leffler(a, aff->a * std::pow(T, a))};
                table.reference = "Mittag-Leffler x0 E_alpha(lambda T^alpha), lambda = " + num(aff->a);
            }
        }
    }
    if (!ref) {
        const double h_ref = *std::min_element(h_list.begin(), h_list.end()) / 8.0;
        ref = x_at_T(h_ref);
        table.reference = "fine-mesh solution at h = " + num(h_ref);
    }

    std::vector<double> hs, errs;
    bool exact = true;
    const double scale = std::max(1.0, euclidean_norm(*ref));
    for (const double h : h_list) {
        const double e = distance(x_at_T(h), *ref);
        table.rows.push_back({h, e});
        hs.push_back(h);
        errs.push_back(e);
        if (e > 1e-12 * scale) exact = false;
    }
    table.exact = exact;
    if (!exact) table.order = least_squares_order(hs, errs);
    return table;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Impulsive Caputo fractional initial-value problems: solve, certify, study convergence", "fracimp"};
    app.require_subcommand(1);
    Overrides o;
    const auto methods = CLI::IsMember({"picard", "marching"});
    const auto schemes = CLI::IsMember({"rectangle", "trapezoid"});

    auto* solve_cmd = app.add_subcommand("solve", "Solve a configured problem and write the trajectory CSV");
    solve_cmd->add_option("--config", o.config, "JSON configuration file")->required();
    solve_cmd->add_option("--out", o.out, "CSV output path (default: output.csv of the config, else stdout)");
    solve_cmd->add_option("--report", o.report, "Run report path");
    solve_cmd->add_option("--method", o.method, "picard or marching")->check(methods);
    solve_cmd->add_option("--scheme", o.scheme, "rectangle or trapezoid")->check(schemes);

    auto* check_cmd = app.add_subcommand("check", "Evaluate the existence and uniqueness certificate");
    check_cmd->add_option("--config", o.config, "JSON configuration file")->required();
    check_cmd->add_option("--report", o.report, "Report path (default: output.report of the config, else stdout)");

    auto* order_cmd = app.add_subcommand("order", "Empirical convergence order over a list of step sizes");
    order_cmd->add_option("--config", o.config, "JSON configuration file")->required();
    order_cmd->add_option("--h-list", o.h_list, "Comma-separated step sizes (at least three)")
        ->delimiter(',')
        ->required();
    order_cmd->add_option("--method", o.method, "picard or marching")->check(methods);
    order_cmd->add_option("--scheme", o.scheme, "rectangle or trapezoid")->check(schemes);
    order_cmd->add_option("--integrand", o.integrand, "Study the quadrature of this g(t) instead of the solver");

    auto* example_cmd = app.add_subcommand("example", "Write a built-in example configuration");
    example_cmd->add_option("name", o.example, "logistic, delay-exp or delay-plain")->required();
    example_cmd->add_option("--out", o.out, "Output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (solve_cmd->parsed()) return cmd_solve(o, out, err);
        if (check_cmd->parsed()) return cmd_check(o, out);
        if (order_cmd->parsed()) return cmd_order(o, out, err);
        return cmd_example(o, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ValidationError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const SolveError& e) {
        err << "solve failed: " << e.what() << "\n";
        return kExitNotConverged;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace fracimp::cli

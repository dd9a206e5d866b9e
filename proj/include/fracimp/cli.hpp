#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fracimp/analysis.hpp"
#include "fracimp/errors.hpp"
#include "fracimp/exprlang.hpp"
#include "fracimp/fracquad.hpp"
#include "fracimp/problem.hpp"
#include "fracimp/solver.hpp"

namespace fracimp::cli {

/// Config error qualified by the JSON field path ("problem.impulses[1].time").
class ConfigError : public ValidationError {
public:
    ConfigError(const std::string& path, const std::string& what)
        : ValidationError(path.empty() ? what : path + ": " + what), path_(path) {}

    const std::string& path() const { return path_; }

private:
    std::string path_;
};

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNotConverged = 2, kExitCertificateFails = 3 };

using ExprList = std::vector<expr::Expr>;

struct RhsConfig {
    RhsKind kind = RhsKind::Plain;
    std::optional<std::string> builtin;
    std::map<std::string, expr::Expr> params;  // builtin parameters
    ExprList f;                                // f, or f1 for the split kind
    ExprList f2;
};

struct ImpulseConfig {
    double time = 0.0;
    ExprList jump;  // in x (= x(t_k^-))
};

struct ImpulseBounds {
    double l1 = 0.0;
    double l2 = 0.0;
    std::optional<double> l1_star;
};

struct DelayConfig {
    double r = 0.0;
    ExprList history;  // phi(t) for t in [-r, 0]
};

struct ProblemConfig {
    double alpha = 0.5;
    double T = 1.0;
    std::optional<State> x0;
    RhsConfig rhs;
    std::vector<ImpulseConfig> impulses;
    std::optional<ImpulseBounds> bounds;  // derived from constant jumps when absent
    std::optional<DelayConfig> delay;
};

struct NumericsConfig {
    double target_h = 1.0 / 256.0;
    QuadScheme scheme = QuadScheme::Trapezoid;
    SolveMethod method = SolveMethod::Picard;
    double tol = 1e-10;
    std::size_t max_iter = 200;
};

struct GronwallConfig {
    double a_max = 0.0;
    double b_max = 0.0;
};

struct CertificateConfig {
    std::optional<double> p;  // nullopt: auto search
    Envelopes envelopes;
    std::optional<GronwallConfig> gronwall;
};

struct OutputConfig {
    std::optional<std::string> csv;
    std::optional<std::string> report;
};

struct RunConfig {
    std::optional<std::string> comment;
    ProblemConfig problem;
    NumericsConfig numerics;
    std::optional<CertificateConfig> certificate;
    OutputConfig output;
};

/// Field-by-field equality; expressions compare structurally.
bool operator==(const RunConfig& a, const RunConfig& b);

/// Strict schema: unknown keys and wrong types are ConfigErrors with the path.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& config);

/// Dimension implied by x0 or the history.
std::size_t state_dim(const ProblemConfig& problem);

/// Effective impulse bounds: declared, or sup |c_k| with l2 = 0 for constant jumps.
ImpulseBounds impulse_bounds(const ProblemConfig& problem);

ProblemSpec build_spec(const RunConfig& config);

inline const std::vector<std::string> kExampleNames = {"logistic", "delay-exp", "delay-plain"};

/// Ready-to-run configuration of a built-in example; ConfigError for unknown names.
RunConfig example_config(std::string_view name);

/// "t,side,x1,..." with two rows (left, right) per impulse node and one
/// (both) elsewhere. Shortest round-trip decimal formatting, '.' separator.
std::string trajectory_csv(const Trajectory& traj);

std::string certificate_report(const Certificate& cert, const RunConfig& config, RhsKind kind);

struct OrderRow {
    double h;
    double error;
};

struct OrderTable {
    std::vector<OrderRow> rows;
    double order = 0.0;
    bool exact = false;
    std::string reference;  // description of the oracle used
};

/// Refinement study of x(T) against the closed form (constant or linear
/// right-hand side without impulses) or a fine-mesh reference at min(h) / 8.
OrderTable solver_order(const RunConfig& config, const std::vector<double>& h_list);

/// Whole command line, returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fracimp::cli

#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "fracimp/fracquad.hpp"
#include "fracimp/problem.hpp"

namespace fracimp {

enum class SolveMethod { Picard, Marching };

std::string_view method_name(SolveMethod m);

struct SolveOptions {
    QuadScheme scheme = QuadScheme::Trapezoid;
    double tol = 1e-10;
    std::size_t max_iter = 200;
};

struct SolveReport {
    Trajectory trajectory;
    std::size_t iterations = 0;  // Picard sweeps, 1 for marching
    double final_residual = 0.0;
    bool converged = false;
    QuadScheme scheme = QuadScheme::Trapezoid;
    SolveMethod method = SolveMethod::Picard;
    std::vector<double> residuals;  // sup-norm of each Picard update
};

/// Fixed-point iteration of the integral equation
///
///   x(t) = x0 + sum_{t_k < t} I_k(x(t_k^-)) + I^alpha[f(., x)](t)
///
/// over the whole mesh. The first iterate is x0 with the jumps applied once.
/// Each sweep evaluates f on the previous iterate, integrates it with the
/// product rule, and accumulates jumps left to right from the new left limits,
/// so right limits always equal left limit plus jump. Stops when the sup-norm
/// update is <= tol; non-convergence is reported, not thrown.
SolveReport solve_picard(const ProblemSpec& spec, const Mesh& mesh, const SolveOptions& options = {});

/// Left-to-right evaluation using only computed samples. Rectangle is fully
/// explicit. Trapezoid predicts with the rectangle value and then iterates
/// the implicit end-point correction at each node until it moves by less
/// than 1e-3 tol (at most max_iter times).
SolveReport solve_marching(const ProblemSpec& spec, const Mesh& mesh, const SolveOptions& options = {});

SolveReport solve(const ProblemSpec& spec, const Mesh& mesh, SolveMethod method, const SolveOptions& options = {});

/// max_k |x(t_k^+) - x(t_k^-) - I_k(x(t_k^-))|; 0 without impulses.
double jump_residual(const Trajectory& traj, const ProblemSpec& spec);

/// I^alpha[f2(., x(.))] at every node (node-major, dim values per node) for a
/// split right-hand side, integrated with the given scheme.
std::vector<double> f2_integral(const ProblemSpec& spec, const Trajectory& traj, QuadScheme scheme);

}  // namespace fracimp

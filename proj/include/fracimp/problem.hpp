#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fracimp/numcore.hpp"

namespace fracimp {

using State = std::vector<double>;

double euclidean_norm(std::span<const double> x);

/// Caputo order alpha, strictly inside (0, 1).
class FractionalOrder {
public:
    explicit FractionalOrder(double alpha);
    double value() const { return alpha_; }

private:
    double alpha_;
};

enum class Side { Left, Right };

/// I_k: state -> jump. Writes the jump into `out` (same dimension as `x`).
using JumpMap = std::function<void(std::span<const double> x, std::span<double> out)>;

struct ImpulseSchedule {
    std::vector<double> times;
    std::vector<JumpMap> jumps;
    double l1 = 0.0;  // sup |I_k(x)|
    double l2 = 0.0;  // Lipschitz constant of every I_k
    std::optional<double> l1_star;

    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }
};

/// Arguments handed to a right-hand side. `xr` and `xtsup` are only
/// meaningful for the delay kinds.
struct RhsContext {
    double t = 0.0;
    std::span<const double> x;
    std::span<const double> xr;
    double xtsup = 0.0;
};

using RhsFn = std::function<void(const RhsContext& ctx, std::span<double> out)>;

enum class RhsKind { Plain, Split, Delay, GeneralDelay };

std::string_view rhs_kind_name(RhsKind k);

/// Envelope functions from the standing assumptions. The starred slots are
/// the alternative Lipschitz envelopes of the uniqueness variants.
struct Envelopes {
    std::optional<EnvelopeFn> M1, M2, L1, L1_star;  // plain / split
    std::optional<EnvelopeFn> M3, M4, L2, L2_star;  // delay
    std::optional<EnvelopeFn> M5, M6, L3, L4, L3_star, L4_star;  // general delay

    /// Slot by name ("M1", "L1*", ...); nullptr for unknown names.
    std::optional<EnvelopeFn>* slot(std::string_view name);
    const std::optional<EnvelopeFn>* slot(std::string_view name) const;

    static const std::vector<std::string>& names();
};

class RhsSpec {
public:
    static RhsSpec plain(RhsFn f);
    static RhsSpec split(RhsFn f1, RhsFn f2);
    static RhsSpec delay(RhsFn f);
    static RhsSpec general_delay(RhsFn f);

    RhsKind kind() const { return kind_; }
    bool uses_history() const { return kind_ == RhsKind::Delay || kind_ == RhsKind::GeneralDelay; }

    /// Full right-hand side (f1 + f2 for the split kind).
    void evaluate(const RhsContext& ctx, std::span<double> out) const;

    /// Only the f2 part of a split right-hand side; throws for other kinds.
    void evaluate_f2(const RhsContext& ctx, std::span<double> out) const;

    Envelopes envelopes;

private:
    RhsSpec(RhsKind kind, RhsFn f, RhsFn f2) : kind_(kind), f_(std::move(f)), f2_(std::move(f2)) {}

    RhsKind kind_;
    RhsFn f_;   // f, or f1 for the split kind
    RhsFn f2_;  // split kind only
};

/// phi on [-r, 0]; writes phi(s) into `out`.
using HistoryFn = std::function<void(double s, std::span<double> out)>;

struct DelaySpec {
    double r = 0.0;
    HistoryFn history;
};

class ProblemSpec {
public:
    /// Validates every invariant. With a delay, an empty `x0` is replaced by
    /// phi(0); a non-empty `x0` must equal phi(0).
    ProblemSpec(FractionalOrder order, double T, State x0, RhsSpec rhs, ImpulseSchedule impulses = {},
                std::optional<DelaySpec> delay = std::nullopt);

    double alpha() const { return order_.value(); }
    FractionalOrder order() const { return order_; }
    double T() const { return T_; }
    std::size_t dim() const { return x0_.size(); }
    const State& x0() const { return x0_; }
    const RhsSpec& rhs() const { return rhs_; }
    const ImpulseSchedule& impulses() const { return impulses_; }
    const std::optional<DelaySpec>& delay() const { return delay_; }

    /// Copy with a different impulse schedule (validated again).
    ProblemSpec with_impulses(ImpulseSchedule impulses) const;
    /// Copy with a different horizon (impulses beyond the horizon are dropped).
    ProblemSpec with_horizon(double T) const;

private:
    FractionalOrder order_;
    double T_;
    State x0_;
    RhsSpec rhs_;
    ImpulseSchedule impulses_;
    std::optional<DelaySpec> delay_;
};

/// Randomized check of declared impulse bounds: 100 states uniform in the
/// ball of radius `radius` for |I_k(x)| <= l1 (and l1*), and 100 pairs for
/// |I_k(x) - I_k(y)| <= l2 |x - y|. Returns human-readable violations.
std::vector<std::string> spot_check_impulses(const ImpulseSchedule& impulses, std::size_t dim, double radius,
                                             std::uint64_t seed = 0x5eed5eedULL);

/// Throws ValidationError if any declared envelope is negative or not
/// evaluable at 100 evenly spaced points of [0, T].
void spot_check_envelopes(const Envelopes& envelopes, double T);

struct MeshSegment {
    std::size_t first;  // node index of the segment start
    std::size_t last;   // node index of the segment end
    double h;
};

/// Piecewise-uniform grid on [0, T] whose nodes include every impulse time.
class Mesh {
public:
    Mesh(std::vector<double> nodes, std::vector<MeshSegment> segments, std::vector<std::size_t> impulse_nodes);

    std::span<const double> nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    std::size_t last_index() const { return nodes_.size() - 1; }
    double operator[](std::size_t i) const { return nodes_[i]; }
    double T() const { return nodes_.back(); }

    const std::vector<MeshSegment>& segments() const { return segments_; }

    /// Node indices of the impulse times, in schedule order.
    const std::vector<std::size_t>& impulse_nodes() const { return impulse_nodes_; }

    /// k such that node i is the k-th impulse time.
    std::optional<std::size_t> impulse_index(std::size_t node) const;

    /// Node index equal to t up to 1e-9 of the local step, if any.
    std::optional<std::size_t> snap(double t) const;

    /// Cell index i with t in [t_i, t_{i+1}]; t must lie in [0, T].
    std::size_t cell_of(double t) const;

    double min_step() const;

private:
    std::vector<double> nodes_;
    std::vector<MeshSegment> segments_;
    std::vector<std::size_t> impulse_nodes_;
    std::vector<std::ptrdiff_t> impulse_lookup_;  // node -> k or -1
};

/// Step of each segment is the largest h <= target_h dividing the segment
/// length; with a delay r, h must additionally divide r.
Mesh build_mesh(const ProblemSpec& spec, double target_h);
Mesh build_mesh(double T, std::span<const double> impulse_times, double target_h,
                std::optional<double> delay_r = std::nullopt);

/// Read-only view of piecewise-continuous samples: PC value (= left limit)
/// at every node plus the right limit at every impulse node.
struct PcView {
    const Mesh* mesh = nullptr;
    std::size_t dim = 1;
    std::span<const double> left;       // size() * dim
    std::span<const double> right_imp;  // impulse count * dim

    std::span<const double> at(std::size_t node, Side side) const;

    /// Piecewise-linear reconstruction; at impulse nodes `side` picks the limit.
    void value_at(double t, Side side, std::span<double> out) const;
};

class Trajectory {
public:
    Trajectory(Mesh mesh, std::size_t dim, std::vector<double> left, std::vector<double> right_imp);

    const Mesh& mesh() const { return mesh_; }
    std::size_t dim() const { return dim_; }

    std::span<const double> left_limit(std::size_t node) const;
    std::span<const double> right_limit(std::size_t node) const;

    /// Value at t in [0, T]; both sides agree except at impulse nodes.
    State evaluate(double t, Side side = Side::Left) const;

    PcView view() const;

    const std::vector<double>& left_values() const { return left_; }
    const std::vector<double>& right_values() const { return right_imp_; }

private:
    Mesh mesh_;
    std::size_t dim_;
    std::vector<double> left_;
    std::vector<double> right_imp_;
};

/// sup |x(s)| over mesh nodes and history samples s in [t - r, t].
///
/// Interior impulse nodes contribute their left limit, the window's left end
/// contributes its right limit when it is an impulse node, and the right end
/// contributes the limit selected by `side`.
class HistoryWindow {
public:
    HistoryWindow(const Mesh& mesh, const DelaySpec& delay, std::size_t dim);

    double r() const { return r_; }

    /// `left_norm[i]` = |x(t_i)|, `right_norm[k]` = |x(t_k^+)| for the k-th impulse.
    double sup_norm(const PcView& values, std::span<const double> left_norm, std::span<const double> right_norm,
                    std::size_t node, Side side) const;

    /// x(t - r) into `out`, reading phi for negative arguments.
    void delayed_value(const PcView& values, std::size_t node, Side side, std::span<double> out) const;

private:
    const Mesh* mesh_;
    const DelaySpec* delay_;
    std::size_t dim_;
    double r_;
    double hist_step_;
    std::vector<double> hist_times_;  // -r .. 0 exclusive of 0
    std::vector<double> hist_norms_;
};

double history_sup_norm(const Trajectory& traj, const DelaySpec& delay, double t, Side side = Side::Left);

}  // namespace fracimp

#include "fracimp/problem.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "fracimp/errors.hpp"
#include "fracimp/simd/kernels.hpp"

namespace fracimp {

double euclidean_norm(std::span<const double> x) {
    if (x.size() == 1) return std::abs(x[0]);
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

FractionalOrder::FractionalOrder(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        std::ostringstream os;
        os << "fractional order alpha = " << alpha << " must lie in the open interval (0, 1)";
        throw ValidationError(os.str());
    }
}

std::string_view rhs_kind_name(RhsKind k) {
    switch (k) {
        case RhsKind::Plain:
            return "plain";
        case RhsKind::Split:
            return "split";
        case RhsKind::Delay:
            return "delay";
        case RhsKind::GeneralDelay:
            return "general-delay";
    }
    return "?";
}

// ---- Envelopes ---------------------------------------------------------------

const std::vector<std::string>& Envelopes::names() {
    static const std::vector<std::string> kNames = {"M1", "M2", "L1", "L1*", "M3", "M4", "L2",
                                                    "L2*", "M5", "M6", "L3", "L4", "L3*", "L4*"};
    return kNames;
}

std::optional<EnvelopeFn>* Envelopes::slot(std::string_view name) {
    return const_cast<std::optional<EnvelopeFn>*>(std::as_const(*this).slot(name));
}

const std::optional<EnvelopeFn>* Envelopes::slot(std::string_view name) const {
    if (name == "M1") return &M1;
    if (name == "M2") return &M2;
    if (name == "L1") return &L1;
    if (name == "L1*") return &L1_star;
    if (name == "M3") return &M3;
    if (name == "M4") return &M4;
    if (name == "L2") return &L2;
    if (name == "L2*") return &L2_star;
    if (name == "M5") return &M5;
    if (name == "M6") return &M6;
    if (name == "L3") return &L3;
    if (name == "L4") return &L4;
    if (name == "L3*") return &L3_star;
    if (name == "L4*") return &L4_star;
    return nullptr;
}

void spot_check_envelopes(const Envelopes& envelopes, double T) {
    for (const auto& name : Envelopes::names()) {
        const auto& env = *envelopes.slot(name);
        if (!env) continue;
        for (int i = 0; i < 100; ++i) {
            const double t = T * static_cast<double>(i) / 99.0;
            double v;
            try {
                v = (*env)(t);
            } catch (const std::exception& e) {
                throw ValidationError("envelope " + name + " not evaluable on [0, T]: " + e.what());
            }
            if (!(v >= 0.0)) {
                std::ostringstream os;
                os << "envelope " << name << " is negative at t = " << t;
                throw ValidationError(os.str());
            }
        }
    }
}

// ---- RhsSpec -----------------------------------------------------------------

RhsSpec RhsSpec::plain(RhsFn f) {
    if (!f) throw ValidationError("plain right-hand side requires an evaluator");
    return RhsSpec(RhsKind::Plain, std::move(f), nullptr);
}

RhsSpec RhsSpec::split(RhsFn f1, RhsFn f2) {
    if (!f1 || !f2) throw ValidationError("split right-hand side requires both f1 and f2");
    return RhsSpec(RhsKind::Split, std::move(f1), std::move(f2));
}

RhsSpec RhsSpec::delay(RhsFn f) {
    if (!f) throw ValidationError("delay right-hand side requires an evaluator");
    return RhsSpec(RhsKind::Delay, std::move(f), nullptr);
}

RhsSpec RhsSpec::general_delay(RhsFn f) {
    if (!f) throw ValidationError("general-delay right-hand side requires an evaluator");
    return RhsSpec(RhsKind::GeneralDelay, std::move(f), nullptr);
}

void RhsSpec::evaluate(const RhsContext& ctx, std::span<double> out) const {
    f_(ctx, out);
    if (kind_ == RhsKind::Split) {
        // Small fixed-size scratch; dimensions are desk scale.
        std::vector<double> part(out.size());
        f2_(ctx, part);
        for (std::size_t c = 0; c < out.size(); ++c) out[c] += part[c];
    }
}

void RhsSpec::evaluate_f2(const RhsContext& ctx, std::span<double> out) const {
    if (kind_ != RhsKind::Split) throw ValidationError("evaluate_f2: right-hand side is not split");
    f2_(ctx, out);
}

// ---- ProblemSpec -------------------------------------------------------------

ProblemSpec::ProblemSpec(FractionalOrder order, double T, State x0, RhsSpec rhs, ImpulseSchedule impulses,
                         std::optional<DelaySpec> delay)
    : order_(order),
      T_(T),
      x0_(std::move(x0)),
      rhs_(std::move(rhs)),
      impulses_(std::move(impulses)),
      delay_(std::move(delay)) {
    if (!(T_ > 0.0) || !std::isfinite(T_)) throw ValidationError("horizon T must be positive and finite");

    if (delay_) {
        if (!(delay_->r > 0.0) || !std::isfinite(delay_->r)) throw ValidationError("delay r must be positive and finite");
        if (!delay_->history) throw ValidationError("delay requires a history function");
        if (!rhs_.uses_history()) throw ValidationError("a delay was given but the right-hand side kind ignores history");
        const std::size_t d = x0_.empty() ? 1 : x0_.size();
        State phi0(d);
        delay_->history(0.0, phi0);
        if (x0_.empty()) {
            x0_ = phi0;
        } else {
            for (std::size_t c = 0; c < d; ++c) {
                if (std::abs(x0_[c] - phi0[c]) > 1e-14 * (1.0 + std::abs(phi0[c])))
                    throw ValidationError("initial state must equal the history value phi(0)");
            }
        }
    } else if (rhs_.uses_history()) {
        throw ValidationError(std::string("right-hand side kind '") + std::string(rhs_kind_name(rhs_.kind())) +
                              "' requires a delay specification");
    }

    if (x0_.empty()) throw ValidationError("state dimension must be at least 1");
    for (double v : x0_)
        if (!std::isfinite(v)) throw ValidationError("initial state must be finite");

    const auto& times = impulses_.times;
    if (times.size() != impulses_.jumps.size())
        throw ValidationError("impulse schedule needs exactly one jump map per impulse time");
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!impulses_.jumps[k]) throw ValidationError("impulse jump map " + std::to_string(k + 1) + " is empty");
        const double prev = k == 0 ? 0.0 : times[k - 1];
        if (!(times[k] > prev)) throw ValidationError("impulse times must satisfy 0 < t_1 < t_2 < ... < t_m");
    }
    if (!times.empty() && !(times.back() < T_)) throw ValidationError("last impulse time must be strictly below T");
    if (!(impulses_.l1 >= 0.0) || !(impulses_.l2 >= 0.0) || (impulses_.l1_star && !(*impulses_.l1_star >= 0.0)))
        throw ValidationError("impulse bounds l1, l2, l1* must be nonnegative");

    spot_check_envelopes(rhs_.envelopes, T_);
}

ProblemSpec ProblemSpec::with_impulses(ImpulseSchedule impulses) const {
    return ProblemSpec(order_, T_, delay_ ? State{} : x0_, rhs_, std::move(impulses), delay_);
}

ProblemSpec ProblemSpec::with_horizon(double T) const {
    ImpulseSchedule kept = impulses_;
    kept.times.clear();
    kept.jumps.clear();
    for (std::size_t k = 0; k < impulses_.size(); ++k) {
        if (impulses_.times[k] < T) {
            kept.times.push_back(impulses_.times[k]);
            kept.jumps.push_back(impulses_.jumps[k]);
        }
    }
    return ProblemSpec(order_, T, delay_ ? State{} : x0_, rhs_, std::move(kept), delay_);
}

std::vector<std::string> spot_check_impulses(const ImpulseSchedule& impulses, std::size_t dim, double radius,
                                             std::uint64_t seed) {
    std::vector<std::string> issues;
    if (impulses.empty()) return issues;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unit;

    const auto sample = [&](State& out) {
        double n2 = 0.0;
        for (auto& v : out) {
            v = normal(rng);
            n2 += v * v;
        }
        const double n = std::sqrt(n2);
        const double scale = n > 0.0 ? radius * std::pow(unit(rng), 1.0 / static_cast<double>(dim)) / n : 0.0;
        for (auto& v : out) v *= scale;
    };

    State x(dim), y(dim), jx(dim), jy(dim), diff(dim);
    constexpr double kRel = 1e-12;
    for (std::size_t k = 0; k < impulses.size(); ++k) {
        double worst_bound = 0.0, worst_ratio = 0.0;
        for (int s = 0; s < 100; ++s) {
            sample(x);
            sample(y);
            impulses.jumps[k](x, jx);
            impulses.jumps[k](y, jy);
            worst_bound = std::max({worst_bound, euclidean_norm(jx), euclidean_norm(jy)});
            for (std::size_t c = 0; c < dim; ++c) diff[c] = jx[c] - jy[c];
            const double num = euclidean_norm(diff);
            for (std::size_t c = 0; c < dim; ++c) diff[c] = x[c] - y[c];
            const double den = euclidean_norm(diff);
            if (den > 0.0) worst_ratio = std::max(worst_ratio, num / den);
        }
        std::ostringstream os;
        if (worst_bound > impulses.l1 * (1.0 + kRel) + 1e-300) {
            os << "impulse " << k + 1 << ": |I_k(x)| reaches " << worst_bound << " > declared l1 = " << impulses.l1;
            issues.push_back(os.str());
            os.str("");
        }
        if (impulses.l1_star && worst_bound > *impulses.l1_star * (1.0 + kRel) + 1e-300) {
            os << "impulse " << k + 1 << ": |I_k(x)| reaches " << worst_bound << " > declared l1* = " << *impulses.l1_star;
            issues.push_back(os.str());
            os.str("");
        }
        if (worst_ratio > impulses.l2 * (1.0 + kRel) + 1e-12) {
            os << "impulse " << k + 1 << ": Lipschitz ratio reaches " << worst_ratio << " > declared l2 = " << impulses.l2;
            issues.push_back(os.str());
        }
    }
    return issues;
}

// ---- Mesh --------------------------------------------------------------------

Mesh::Mesh(std::vector<double> nodes, std::vector<MeshSegment> segments, std::vector<std::size_t> impulse_nodes)
    : nodes_(std::move(nodes)), segments_(std::move(segments)), impulse_nodes_(std::move(impulse_nodes)) {
    if (nodes_.size() < 2) throw ValidationError("mesh needs at least two nodes");
    for (std::size_t i = 1; i < nodes_.size(); ++i)
        if (!(nodes_[i] > nodes_[i - 1])) throw ValidationError("mesh nodes must be strictly increasing");
    impulse_lookup_.assign(nodes_.size(), -1);
    for (std::size_t k = 0; k < impulse_nodes_.size(); ++k) {
        const std::size_t i = impulse_nodes_[k];
        if (i == 0 || i >= nodes_.size() - 1) throw ValidationError("impulse nodes must be interior");
        impulse_lookup_[i] = static_cast<std::ptrdiff_t>(k);
    }
}

std::optional<std::size_t> Mesh::impulse_index(std::size_t node) const {
    if (node >= impulse_lookup_.size() || impulse_lookup_[node] < 0) return std::nullopt;
    return static_cast<std::size_t>(impulse_lookup_[node]);
}

std::size_t Mesh::cell_of(double t) const {
    if (!(t >= nodes_.front() && t <= nodes_.back())) {
        std::ostringstream os;
        os << "t = " << t << " outside [0, " << nodes_.back() << "]";
        throw DomainError(os.str());
    }
    const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - nodes_.begin());
    i = i == 0 ? 0 : i - 1;
    return std::min(i, nodes_.size() - 2);
}

std::optional<std::size_t> Mesh::snap(double t) const {
    const double slack = 1e-9 * min_step();
    if (t < nodes_.front() - slack || t > nodes_.back() + slack) return std::nullopt;
    const double clamped = std::clamp(t, nodes_.front(), nodes_.back());
    const std::size_t i = cell_of(clamped);
    if (std::abs(nodes_[i] - t) <= slack) return i;
    if (std::abs(nodes_[i + 1] - t) <= slack) return i + 1;
    return std::nullopt;
}

double Mesh::min_step() const {
    double h = nodes_.back() - nodes_.front();
    for (const auto& s : segments_) h = std::min(h, s.h);
    return h;
}

namespace {

// Smallest n >= n_min such that r / (L / n) is an integer.
std::optional<std::size_t> commensurable_count(double L, double r, std::size_t n_min) {
    const std::size_t n_max = std::max<std::size_t>(n_min * 4096, 1 << 16);
    for (std::size_t n = n_min; n <= n_max; ++n) {
        const double ratio = r * static_cast<double>(n) / L;
        if (ratio >= 1.0 - 1e-9 && std::abs(ratio - std::round(ratio)) <= 1e-9 * std::max(1.0, ratio)) return n;
    }
    return std::nullopt;
}

}  // namespace

Mesh build_mesh(double T, std::span<const double> impulse_times, double target_h, std::optional<double> delay_r) {
    if (!(target_h > 0.0)) throw RefinementError("target step must be positive");
    std::vector<double> bounds{0.0};
    bounds.insert(bounds.end(), impulse_times.begin(), impulse_times.end());
    bounds.push_back(T);

    double shortest = T;
    for (std::size_t s = 1; s < bounds.size(); ++s) shortest = std::min(shortest, bounds[s] - bounds[s - 1]);
    if (target_h >= shortest) {
        std::ostringstream os;
        os << "target step " << target_h << " is not below the shortest segment length " << shortest
           << "; refine the step so every inter-impulse segment holds at least two cells";
        throw RefinementError(os.str());
    }

    std::vector<double> nodes{0.0};
    std::vector<MeshSegment> segments;
    std::vector<std::size_t> impulse_nodes;
    for (std::size_t s = 1; s < bounds.size(); ++s) {
        const double a = bounds[s - 1];
        const double b = bounds[s];
        const double L = b - a;
        const double ratio = L / target_h;
        auto n = static_cast<std::size_t>(std::ceil(ratio));
        if (std::abs(ratio - std::round(ratio)) <= 1e-9 * ratio) n = static_cast<std::size_t>(std::round(ratio));
        n = std::max<std::size_t>(n, 1);
        if (delay_r) {
            const auto m = commensurable_count(L, *delay_r, n);
            if (!m) {
                std::ostringstream os;
                os << "no step <= " << target_h << " divides both the segment [" << a << ", " << b << "] and the delay r = "
                   << *delay_r;
                throw RefinementError(os.str());
            }
            n = *m;
        }
        const double h = L / static_cast<double>(n);
        const std::size_t first = nodes.size() - 1;
        for (std::size_t i = 1; i < n; ++i) nodes.push_back(a + h * static_cast<double>(i));
        nodes.push_back(b);  // exact boundary value
        segments.push_back({first, nodes.size() - 1, h});
        if (s + 1 < bounds.size()) impulse_nodes.push_back(nodes.size() - 1);
    }
    return Mesh(std::move(nodes), std::move(segments), std::move(impulse_nodes));
}

Mesh build_mesh(const ProblemSpec& spec, double target_h) {
    std::optional<double> r;
    if (spec.delay()) r = spec.delay()->r;
    return build_mesh(spec.T(), spec.impulses().times, target_h, r);
}

// ---- PcView / Trajectory -----------------------------------------------------

std::span<const double> PcView::at(std::size_t node, Side side) const {
    if (side == Side::Right) {
        if (const auto k = mesh->impulse_index(node)) return right_imp.subspan(*k * dim, dim);
    }
    return left.subspan(node * dim, dim);
}

void PcView::value_at(double t, Side side, std::span<double> out) const {
    if (const auto node = mesh->snap(t)) {
        const auto v = at(*node, side);
        std::copy(v.begin(), v.end(), out.begin());
        return;
    }
    const std::size_t i = mesh->cell_of(t);
    const double t0 = (*mesh)[i];
    const double t1 = (*mesh)[i + 1];
    const double w = (t - t0) / (t1 - t0);
    const auto a = at(i, Side::Right);
    const auto b = at(i + 1, Side::Left);
    for (std::size_t c = 0; c < dim; ++c) out[c] = (1.0 - w) * a[c] + w * b[c];
}

Trajectory::Trajectory(Mesh mesh, std::size_t dim, std::vector<double> left, std::vector<double> right_imp)
    : mesh_(std::move(mesh)), dim_(dim), left_(std::move(left)), right_imp_(std::move(right_imp)) {
    if (dim_ == 0) throw ValidationError("trajectory dimension must be positive");
    if (left_.size() != mesh_.size() * dim_) throw ValidationError("trajectory needs one state per mesh node");
    if (right_imp_.size() != mesh_.impulse_nodes().size() * dim_)
        throw ValidationError("trajectory needs one right limit per impulse node");
}

std::span<const double> Trajectory::left_limit(std::size_t node) const { return view().at(node, Side::Left); }

std::span<const double> Trajectory::right_limit(std::size_t node) const { return view().at(node, Side::Right); }

PcView Trajectory::view() const { return PcView{&mesh_, dim_, left_, right_imp_}; }

State Trajectory::evaluate(double t, Side side) const {
    if (!(t >= 0.0 && t <= mesh_.T())) {
        std::ostringstream os;
        os << "evaluate: t = " << t << " outside [0, " << mesh_.T() << "]";
        throw DomainError(os.str());
    }
    State out(dim_);
    view().value_at(t, side, out);
    return out;
}

// ---- History window ----------------------------------------------------------

HistoryWindow::HistoryWindow(const Mesh& mesh, const DelaySpec& delay, std::size_t dim)
    : mesh_(&mesh), delay_(&delay), dim_(dim), r_(delay.r) {
    const double h = mesh.segments().front().h;
    const auto n = static_cast<std::size_t>(std::max(1.0, std::round(r_ / h)));
    hist_step_ = r_ / static_cast<double>(n);
    State phi(dim);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = -r_ + hist_step_ * static_cast<double>(i);
        delay.history(s, phi);
        hist_times_.push_back(s);
        hist_norms_.push_back(euclidean_norm(phi));
    }
}

double HistoryWindow::sup_norm(const PcView& values, std::span<const double> left_norm,
                               std::span<const double> right_norm, std::size_t node, Side side) const {
    const Mesh& mesh = *mesh_;
    const double t = mesh[node];
    const double lo = t - r_;
    double best = 0.0;
    State tmp(dim_);

    // History samples in [lo, 0).
    if (lo < 0.0) {
        const double slack = 1e-9 * hist_step_;
        const auto it = std::lower_bound(hist_times_.begin(), hist_times_.end(), lo - slack);
        const auto first = static_cast<std::size_t>(it - hist_times_.begin());
        if (first < hist_norms_.size())
            best = std::max(best, simd::max_value(std::span<const double>(hist_norms_).subspan(first)));
        delay_->history(lo, tmp);
        best = std::max(best, euclidean_norm(tmp));
    }

    // Mesh nodes in [max(lo, 0), t].
    std::size_t i_lo = 0;
    bool lo_is_node = lo <= 0.0;
    if (lo > 0.0) {
        if (const auto s = mesh.snap(lo)) {
            i_lo = *s;
            lo_is_node = true;
        } else {
            i_lo = mesh.cell_of(lo) + 1;
            values.value_at(lo, Side::Right, tmp);
            best = std::max(best, euclidean_norm(tmp));
        }
    }
    const std::size_t i_hi = node;

    const auto norm_at = [&](std::size_t i, Side s) {
        if (s == Side::Right) {
            if (const auto k = mesh.impulse_index(i)) return right_norm[*k];
        }
        return left_norm[i];
    };

    if (i_lo == i_hi) {
        const Side s = (side == Side::Right || (lo > 0.0 && lo_is_node)) ? Side::Right : Side::Left;
        return std::max(best, norm_at(i_lo, s));
    }
    best = std::max(best, norm_at(i_lo, lo > 0.0 && lo_is_node ? Side::Right : Side::Left));
    best = std::max(best, norm_at(i_hi, side));
    if (i_hi > i_lo + 1) best = std::max(best, simd::max_value(left_norm.subspan(i_lo + 1, i_hi - i_lo - 1)));
    return best;
}

void HistoryWindow::delayed_value(const PcView& values, std::size_t node, Side side, std::span<double> out) const {
    const double s = (*mesh_)[node] - r_;
    if (s < 0.0 && !(mesh_->snap(s) == std::optional<std::size_t>{0})) {
        delay_->history(s, out);
        return;
    }
    values.value_at(std::max(s, 0.0), side, out);
}

double history_sup_norm(const Trajectory& traj, const DelaySpec& delay, double t, Side side) {
    const Mesh& mesh = traj.mesh();
    if (!(t >= 0.0 && t <= mesh.T())) {
        std::ostringstream os;
        os << "history_sup_norm: t = " << t << " outside [0, " << mesh.T() << "]";
        throw DomainError(os.str());
    }
    const std::size_t d = traj.dim();
    std::vector<double> left_norm(mesh.size());
    for (std::size_t i = 0; i < mesh.size(); ++i) left_norm[i] = euclidean_norm(traj.left_limit(i));
    std::vector<double> right_norm(mesh.impulse_nodes().size());
    for (std::size_t k = 0; k < right_norm.size(); ++k)
        right_norm[k] = euclidean_norm(traj.right_limit(mesh.impulse_nodes()[k]));

    HistoryWindow window(mesh, delay, d);
    if (const auto node = mesh.snap(t)) return window.sup_norm(traj.view(), left_norm, right_norm, *node, side);

    // Off-node query: the window's right end is an interpolated point.
    const std::size_t below = mesh.cell_of(t);
    double best = euclidean_norm(traj.evaluate(t, side));
    const double lo = t - delay.r;
    State tmp(d);
    if (lo < 0.0) {
        const double h = mesh.segments().front().h;
        const auto n = static_cast<std::size_t>(std::max(1.0, std::round(delay.r / h)));
        const double step = delay.r / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double s = -delay.r + step * static_cast<double>(i);
            if (s < lo - 1e-9 * step) continue;
            delay.history(s, tmp);
            best = std::max(best, euclidean_norm(tmp));
        }
        delay.history(lo, tmp);
        best = std::max(best, euclidean_norm(tmp));
    } else {
        best = std::max(best, euclidean_norm(traj.evaluate(lo, Side::Right)));
    }
    for (std::size_t i = 0; i <= below; ++i) {
        const double ti = mesh[i];
        if (ti < lo - 1e-9 * mesh.min_step()) continue;
        const bool left_end = lo > 0.0 && mesh.snap(lo) == std::optional<std::size_t>{i};
        best = std::max(best, euclidean_norm(left_end ? traj.right_limit(i) : traj.left_limit(i)));
    }
    return best;
}

}  // namespace fracimp

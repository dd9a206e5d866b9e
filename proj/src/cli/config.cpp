#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "fracimp/cli.hpp"
#include "json.hpp"

namespace fracimp::cli {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

// Object reader that remembers which keys were consumed.
class Obj {
public:
    Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j.is_object()) throw ConfigError(path_, "expected an object");
    }

    const json* get(const std::string& key) {
        used_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    const json& need(const std::string& key) {
        const json* v = get(key);
        if (!v) throw ConfigError(at(key), "required field missing");
        return *v;
    }

    std::string at(const std::string& key) const { return join(path_, key); }
    const std::string& path() const { return path_; }

    void finish() const {
        for (const auto& item : j_.items())
            if (!used_.count(item.key())) throw ConfigError(at(item.key()), "unknown key");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

double number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
    return v;
}

double positive(const json& j, const std::string& path) {
    const double v = number(j, path);
    if (!(v > 0.0)) throw ConfigError(path, "must be positive");
    return v;
}

double nonnegative(const json& j, const std::string& path) {
    const double v = number(j, path);
    if (v < 0.0) throw ConfigError(path, "must be nonnegative");
    return v;
}

std::string text(const json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError(path, "expected a string");
    return j.get<std::string>();
}

std::vector<double> numbers(const json& j, const std::string& path) {
    if (j.is_number()) return {number(j, path)};
    if (!j.is_array()) throw ConfigError(path, "expected a number or an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], index(path, i)));
    return out;
}

expr::Expr expression(const json& j, const std::string& path) {
    std::string src;
    if (j.is_number())
        src = j.dump();
    else
        src = text(j, path);
    try {
        return expr::parse(src);
    } catch (const ParseError& e) {
        throw ConfigError(path, e.what());
    }
}

ExprList expressions(const json& j, const std::string& path) {
    if (!j.is_array()) return {expression(j, path)};
    if (j.empty()) throw ConfigError(path, "expected at least one expression");
    ExprList out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(expression(j[i], index(path, i)));
    return out;
}

void check_variables(const ExprList& list, const std::set<expr::VarKind>& allowed, std::size_t dim,
                     const std::string& path, const std::string& context) {
    for (std::size_t i = 0; i < list.size(); ++i) {
        const auto use = expr::variables(list[i]);
        const std::string where = list.size() == 1 ? path : index(path, i);
        for (const auto kind : use.kinds) {
            if (!allowed.count(kind))
                throw ConfigError(where, "variable '" + std::string(expr::var_kind_name(kind)) + "' is not allowed in " +
                                             context);
        }
        if (use.max_state_component > dim || use.max_delayed_component > dim)
            throw ConfigError(where, "state component beyond dimension " + std::to_string(dim));
    }
}

void check_count(const ExprList& list, std::size_t dim, const std::string& path) {
    if (list.size() != dim)
        throw ConfigError(path, "expected " + std::to_string(dim) + " expression(s), one per state component, got " +
                                    std::to_string(list.size()));
}

RhsKind parse_kind(const std::string& s, const std::string& path) {
    for (const auto k : {RhsKind::Plain, RhsKind::Split, RhsKind::Delay, RhsKind::GeneralDelay})
        if (s == rhs_kind_name(k)) return k;
    throw ConfigError(path, "unknown kind '" + s + "' (plain, split, delay, general-delay)");
}

std::set<expr::VarKind> rhs_vocabulary(RhsKind kind) {
    using expr::VarKind;
    switch (kind) {
        case RhsKind::Plain:
        case RhsKind::Split:
            return {VarKind::Time, VarKind::State};
        case RhsKind::Delay:
            return {VarKind::Time, VarKind::Delayed, VarKind::HistorySup};
        case RhsKind::GeneralDelay:
            break;
    }
    return {VarKind::Time, VarKind::State, VarKind::Delayed, VarKind::HistorySup};
}

struct BuiltinDef {
    std::string name;
    RhsKind kind;
    std::map<std::string, std::string> defaults;
};

const std::vector<BuiltinDef>& builtins() {
    static const std::vector<BuiltinDef> defs = {
        {"logistic", RhsKind::Split, {{"a", "1"}, {"b", "1"}}},
        {"delay-exp", RhsKind::Delay, {{"nu", "1"}}},
        {"delay-plain", RhsKind::Delay, {}},
    };
    return defs;
}

std::string wrap(const expr::Expr& e) { return "(" + expr::to_string(e) + ")"; }

void expand_builtin(RhsConfig& rhs, const std::string& path) {
    const auto& defs = builtins();
    const auto def = std::find_if(defs.begin(), defs.end(), [&](const BuiltinDef& d) { return d.name == *rhs.builtin; });
    if (def == defs.end()) throw ConfigError(path, "unknown builtin '" + *rhs.builtin + "' (logistic, delay-exp, delay-plain)");
    for (const auto& [key, value] : rhs.params)
        if (!def->defaults.count(key)) throw ConfigError(join(path, "params." + key), "unknown parameter");
    for (const auto& [key, value] : def->defaults)
        if (!rhs.params.count(key)) rhs.params.emplace(key, expr::parse(value));
    rhs.kind = def->kind;
    rhs.f.clear();
    rhs.f2.clear();
    if (def->name == "logistic") {
        const std::set<expr::VarKind> time_only = {expr::VarKind::Time};
        check_variables({rhs.params.at("a")}, time_only, 1, join(path, "params.a"), "a(t)");
        check_variables({rhs.params.at("b")}, time_only, 1, join(path, "params.b"), "b(t)");
        rhs.f.push_back(expr::parse(wrap(rhs.params.at("a")) + "*x"));
        rhs.f2.push_back(expr::parse("-" + wrap(rhs.params.at("b")) + "*x^2"));
    } else if (def->name == "delay-exp") {
        check_variables({rhs.params.at("nu")}, {}, 1, join(path, "params.nu"), "nu");
        rhs.f.push_back(expr::parse("exp(-" + wrap(rhs.params.at("nu")) + "*t)*xtsup/((1+exp(t))*(1+xtsup))"));
    } else {
        rhs.f.push_back(expr::parse("xtsup/((1+exp(t))*(1+xtsup))"));
    }
}

EnvelopeFn parse_envelope(const json& j, const std::string& path) {
    try {
        if (j.is_number()) return EnvelopeFn::constant(number(j, path));
        Obj o(j, path);
        if (j.size() != 1) throw ConfigError(path, "expected exactly one of constant, exp_decay, sampled");
        if (const json* c = o.get("constant")) return EnvelopeFn::constant(number(*c, o.at("constant")));
        if (const json* e = o.get("exp_decay")) {
            Obj d(*e, o.at("exp_decay"));
            const double scale = number(d.need("scale"), d.at("scale"));
            const double rate = number(d.need("rate"), d.at("rate"));
            d.finish();
            return EnvelopeFn::exp_decay(scale, rate);
        }
        if (const json* s = o.get("sampled")) {
            Obj d(*s, o.at("sampled"));
            auto t = numbers(d.need("t"), d.at("t"));
            auto g = numbers(d.need("g"), d.at("g"));
            d.finish();
            return EnvelopeFn::sampled(std::move(t), std::move(g));
        }
        o.finish();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(path, e.what());
    }
    throw ConfigError(path, "expected exactly one of constant, exp_decay, sampled");
}

json envelope_json(const EnvelopeFn& env) {
    return std::visit(
        [](const auto& r) -> json {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, EnvelopeFn::Constant>)
                return {{"constant", r.value}};
            else if constexpr (std::is_same_v<R, EnvelopeFn::ExpDecay>)
                return {{"exp_decay", {{"scale", r.scale}, {"rate", r.rate}}}};
            else
                return {{"sampled", {{"t", r.t}, {"g", r.g}}}};
        },
        env.repr());
}

json exprs_json(const ExprList& list) {
    if (list.size() == 1) return expr::to_string(list.front());
    json arr = json::array();
    for (const auto& e : list) arr.push_back(expr::to_string(e));
    return arr;
}

json param_json(const expr::Expr& e) {
    if (const auto* n = std::get_if<expr::Number>(&e.root().v)) return n->value;
    return expr::to_string(e);
}

ProblemConfig parse_problem(const json& j) {
    Obj o(j, "problem");
    ProblemConfig p;
    p.alpha = number(o.need("alpha"), o.at("alpha"));
    if (!(p.alpha > 0.0 && p.alpha < 1.0))
        throw ConfigError(o.at("alpha"), "the order must satisfy alpha in (0, 1), got " + o.need("alpha").dump());
    p.T = positive(o.need("T"), o.at("T"));
    if (const json* x0 = o.get("x0")) p.x0 = numbers(*x0, o.at("x0"));

    if (const json* d = o.get("delay")) {
        Obj od(*d, o.at("delay"));
        DelayConfig dc;
        dc.r = positive(od.need("r"), od.at("r"));
        dc.history = expressions(od.need("history"), od.at("history"));
        od.finish();
        check_variables(dc.history, {expr::VarKind::Time}, dc.history.size(), od.at("history"), "a history");
        p.delay = std::move(dc);
    }
    if (!p.x0 && !p.delay) throw ConfigError(o.at("x0"), "required field missing (no delay history given)");
    if (p.x0 && p.x0->empty()) throw ConfigError(o.at("x0"), "expected at least one component");
    if (p.x0 && p.delay && p.x0->size() != p.delay->history.size())
        throw ConfigError(o.at("x0"), "dimension differs from problem.delay.history");
    const std::size_t dim = state_dim(p);

    {
        Obj orhs(o.need("rhs"), o.at("rhs"));
        RhsConfig& rhs = p.rhs;
        if (const json* b = orhs.get("builtin")) {
            rhs.builtin = text(*b, orhs.at("builtin"));
            if (const json* params = orhs.get("params")) {
                if (!params->is_object()) throw ConfigError(orhs.at("params"), "expected an object");
                for (const auto& item : params->items())
                    rhs.params.emplace(item.key(), expression(item.value(), orhs.at("params." + item.key())));
            }
            orhs.finish();
            if (dim != 1) throw ConfigError(orhs.at("builtin"), "builtin right-hand sides are scalar (dimension 1)");
            expand_builtin(rhs, orhs.path());
        } else {
            rhs.kind = parse_kind(text(orhs.need("kind"), orhs.at("kind")), orhs.at("kind"));
            const auto vocab = rhs_vocabulary(rhs.kind);
            const std::string context = "a " + std::string(rhs_kind_name(rhs.kind)) + " right-hand side";
            if (rhs.kind == RhsKind::Split) {
                rhs.f = expressions(orhs.need("f1"), orhs.at("f1"));
                rhs.f2 = expressions(orhs.need("f2"), orhs.at("f2"));
                check_count(rhs.f, dim, orhs.at("f1"));
                check_count(rhs.f2, dim, orhs.at("f2"));
                check_variables(rhs.f, vocab, dim, orhs.at("f1"), context);
                check_variables(rhs.f2, vocab, dim, orhs.at("f2"), context);
            } else {
                rhs.f = expressions(orhs.need("f"), orhs.at("f"));
                check_count(rhs.f, dim, orhs.at("f"));
                check_variables(rhs.f, vocab, dim, orhs.at("f"), context);
            }
            orhs.finish();
        }
        if (rhs.kind == RhsKind::Delay || rhs.kind == RhsKind::GeneralDelay) {
            if (!p.delay) throw ConfigError(orhs.path(), "a delay right-hand side needs problem.delay");
        }
    }

    if (const json* imps = o.get("impulses")) {
        if (!imps->is_array()) throw ConfigError(o.at("impulses"), "expected an array");
        for (std::size_t i = 0; i < imps->size(); ++i) {
            const std::string path = index(o.at("impulses"), i);
            Obj oi((*imps)[i], path);
            ImpulseConfig ic;
            ic.time = number(oi.need("time"), oi.at("time"));
            if (!(ic.time > 0.0 && ic.time < p.T)) throw ConfigError(oi.at("time"), "must lie in (0, T)");
            if (!p.impulses.empty() && !(ic.time > p.impulses.back().time))
                throw ConfigError(oi.at("time"), "impulse times must increase strictly");
            ic.jump = expressions(oi.need("jump"), oi.at("jump"));
            oi.finish();
            check_count(ic.jump, dim, oi.at("jump"));
            check_variables(ic.jump, {expr::VarKind::State}, dim, oi.at("jump"), "a jump map");
            p.impulses.push_back(std::move(ic));
        }
    }

    if (const json* b = o.get("impulse_bounds")) {
        Obj ob(*b, o.at("impulse_bounds"));
        ImpulseBounds ib;
        ib.l1 = nonnegative(ob.need("l1"), ob.at("l1"));
        ib.l2 = nonnegative(ob.need("l2"), ob.at("l2"));
        if (const json* s = ob.get("l1_star")) ib.l1_star = nonnegative(*s, ob.at("l1_star"));
        ob.finish();
        p.bounds = ib;
    }
    o.finish();
    impulse_bounds(p);
    return p;
}

NumericsConfig parse_numerics(const json& j) {
    Obj o(j, "numerics");
    NumericsConfig n;
    if (const json* h = o.get("target_h")) n.target_h = positive(*h, o.at("target_h"));
    if (const json* s = o.get("scheme")) {
        const std::string v = text(*s, o.at("scheme"));
        if (v == "rectangle")
            n.scheme = QuadScheme::Rectangle;
        else if (v == "trapezoid")
            n.scheme = QuadScheme::Trapezoid;
        else
            throw ConfigError(o.at("scheme"), "expected rectangle or trapezoid");
    }
    if (const json* m = o.get("method")) {
        const std::string v = text(*m, o.at("method"));
        if (v == "picard")
            n.method = SolveMethod::Picard;
        else if (v == "marching")
            n.method = SolveMethod::Marching;
        else
            throw ConfigError(o.at("method"), "expected picard or marching");
    }
    if (const json* t = o.get("tol")) n.tol = positive(*t, o.at("tol"));
    if (const json* m = o.get("max_iter")) {
        if (!m->is_number_integer() || m->get<long long>() < 1)
            throw ConfigError(o.at("max_iter"), "expected a positive integer");
        n.max_iter = m->get<std::size_t>();
    }
    o.finish();
    return n;
}

CertificateConfig parse_certificate(const json& j) {
    Obj o(j, "certificate");
    CertificateConfig c;
    if (const json* p = o.get("p")) {
        if (p->is_string()) {
            if (p->get<std::string>() != "auto") throw ConfigError(o.at("p"), "expected a number or \"auto\"");
        } else {
            c.p = positive(*p, o.at("p"));
        }
    }
    if (const json* e = o.get("envelopes")) {
        Obj oe(*e, o.at("envelopes"));
        for (const auto& name : Envelopes::names())
            if (const json* v = oe.get(name)) *c.envelopes.slot(name) = parse_envelope(*v, oe.at(name));
        oe.finish();
    }
    if (const json* g = o.get("gronwall")) {
        Obj og(*g, o.at("gronwall"));
        GronwallConfig gc;
        gc.a_max = positive(og.need("a_max"), og.at("a_max"));
        gc.b_max = positive(og.need("b_max"), og.at("b_max"));
        og.finish();
        c.gronwall = gc;
    }
    o.finish();
    return c;
}

bool same_list(const ExprList& a, const ExprList& b) { return a == b; }

bool same_envelopes(const Envelopes& a, const Envelopes& b) {
    for (const auto& name : Envelopes::names())
        if (!(*a.slot(name) == *b.slot(name))) return false;
    return true;
}

}  // namespace

std::size_t state_dim(const ProblemConfig& problem) {
    if (problem.x0) return problem.x0->size();
    return problem.delay ? problem.delay->history.size() : 0;
}

ImpulseBounds impulse_bounds(const ProblemConfig& problem) {
    if (problem.bounds) return *problem.bounds;
    ImpulseBounds b;
    for (std::size_t k = 0; k < problem.impulses.size(); ++k) {
        State c;
        for (const auto& e : problem.impulses[k].jump) {
            if (!expr::variables(e).kinds.empty())
                throw ConfigError("problem.impulse_bounds", "required when a jump depends on x");
            c.push_back(expr::eval(e, expr::Bindings{}));
        }
        b.l1 = std::max(b.l1, euclidean_norm(c));
    }
    b.l1_star = b.l1;
    return b;
}

RunConfig parse_config(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
    Obj o(j, "");
    RunConfig c;
    if (const json* m = o.get("comment")) c.comment = text(*m, "comment");
    c.problem = parse_problem(o.need("problem"));
    if (const json* n = o.get("numerics")) c.numerics = parse_numerics(*n);
    if (const json* cert = o.get("certificate")) c.certificate = parse_certificate(*cert);
    if (const json* out = o.get("output")) {
        Obj oo(*out, "output");
        if (const json* csv = oo.get("csv")) c.output.csv = text(*csv, oo.at("csv"));
        if (const json* rep = oo.get("report")) c.output.report = text(*rep, oo.at("report"));
        oo.finish();
    }
    o.finish();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", "cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
    json j = json::object();
    if (c.comment) j["comment"] = *c.comment;

    const ProblemConfig& p = c.problem;
    json pj = {{"alpha", p.alpha}, {"T", p.T}};
    if (p.x0) pj["x0"] = p.x0->size() == 1 ? json(p.x0->front()) : json(*p.x0);
    if (p.rhs.builtin) {
        json params = json::object();
        for (const auto& [k, v] : p.rhs.params) params[k] = param_json(v);
        pj["rhs"] = {{"builtin", *p.rhs.builtin}, {"params", params}};
    } else if (p.rhs.kind == RhsKind::Split) {
        pj["rhs"] = {{"kind", rhs_kind_name(p.rhs.kind)}, {"f1", exprs_json(p.rhs.f)}, {"f2", exprs_json(p.rhs.f2)}};
    } else {
        pj["rhs"] = {{"kind", rhs_kind_name(p.rhs.kind)}, {"f", exprs_json(p.rhs.f)}};
    }
    if (!p.impulses.empty()) {
        json arr = json::array();
        for (const auto& ic : p.impulses) arr.push_back({{"time", ic.time}, {"jump", exprs_json(ic.jump)}});
        pj["impulses"] = arr;
    }
    if (p.bounds) {
        json b = {{"l1", p.bounds->l1}, {"l2", p.bounds->l2}};
        if (p.bounds->l1_star) b["l1_star"] = *p.bounds->l1_star;
        pj["impulse_bounds"] = b;
    }
    if (p.delay) pj["delay"] = {{"r", p.delay->r}, {"history", exprs_json(p.delay->history)}};
    j["problem"] = pj;

    const NumericsConfig& n = c.numerics;
    j["numerics"] = {{"target_h", n.target_h},
                     {"scheme", scheme_name(n.scheme)},
                     {"method", method_name(n.method)},
                     {"tol", n.tol},
                     {"max_iter", n.max_iter}};

    if (c.certificate) {
        json cj = json::object();
        cj["p"] = c.certificate->p ? json(*c.certificate->p) : json("auto");
        json env = json::object();
        for (const auto& name : Envelopes::names())
            if (const auto& slot = *c.certificate->envelopes.slot(name)) env[name] = envelope_json(*slot);
        if (!env.empty()) cj["envelopes"] = env;
        if (c.certificate->gronwall)
            cj["gronwall"] = {{"a_max", c.certificate->gronwall->a_max}, {"b_max", c.certificate->gronwall->b_max}};
        j["certificate"] = cj;
    }

    json out = json::object();
    if (c.output.csv) out["csv"] = *c.output.csv;
    if (c.output.report) out["report"] = *c.output.report;
    if (!out.empty()) j["output"] = out;
    return j.dump(2) + "\n";
}

bool operator==(const RunConfig& a, const RunConfig& b) {
    const ProblemConfig &p = a.problem, &q = b.problem;
    if (a.comment != b.comment) return false;
    if (p.alpha != q.alpha || p.T != q.T || p.x0 != q.x0) return false;
    if (p.rhs.kind != q.rhs.kind || p.rhs.builtin != q.rhs.builtin || p.rhs.params.size() != q.rhs.params.size())
        return false;
    for (const auto& [k, v] : p.rhs.params) {
        const auto it = q.rhs.params.find(k);
        if (it == q.rhs.params.end() || !(it->second == v)) return false;
    }
    if (!same_list(p.rhs.f, q.rhs.f) || !same_list(p.rhs.f2, q.rhs.f2)) return false;
    if (p.impulses.size() != q.impulses.size()) return false;
    for (std::size_t k = 0; k < p.impulses.size(); ++k)
        if (p.impulses[k].time != q.impulses[k].time || !same_list(p.impulses[k].jump, q.impulses[k].jump))
            return false;
    if (p.bounds.has_value() != q.bounds.has_value()) return false;
    if (p.bounds && (p.bounds->l1 != q.bounds->l1 || p.bounds->l2 != q.bounds->l2 ||
                     p.bounds->l1_star != q.bounds->l1_star))
        return false;
    if (p.delay.has_value() != q.delay.has_value()) return false;
    if (p.delay && (p.delay->r != q.delay->r || !same_list(p.delay->history, q.delay->history))) return false;

    const NumericsConfig &n = a.numerics, &m = b.numerics;
    if (n.target_h != m.target_h || n.scheme != m.scheme || n.method != m.method || n.tol != m.tol ||
        n.max_iter != m.max_iter)
        return false;

    if (a.certificate.has_value() != b.certificate.has_value()) return false;
    if (a.certificate) {
        const auto &c = *a.certificate, &d = *b.certificate;
        if (c.p != d.p || !same_envelopes(c.envelopes, d.envelopes)) return false;
        if (c.gronwall.has_value() != d.gronwall.has_value()) return false;
        if (c.gronwall && (c.gronwall->a_max != d.gronwall->a_max || c.gronwall->b_max != d.gronwall->b_max))
            return false;
    }
    return a.output.csv == b.output.csv && a.output.report == b.output.report;
}

namespace {

RhsFn rhs_fn(ExprList list) {
    return [list = std::move(list)](const RhsContext& ctx, std::span<double> out) {
        expr::Bindings b;
        b.time(ctx.t).state(ctx.x).delayed(ctx.xr).history_sup(ctx.xtsup);
        for (std::size_t c = 0; c < list.size(); ++c) out[c] = expr::eval(list[c], b);
    };
}

}  // namespace

ProblemSpec build_spec(const RunConfig& config) {
    const ProblemConfig& p = config.problem;
    const RhsConfig& r = p.rhs;
    try {
        RhsSpec rhs = [&] {
            switch (r.kind) {
                case RhsKind::Split:
                    return RhsSpec::split(rhs_fn(r.f), rhs_fn(r.f2));
                case RhsKind::Delay:
                    return RhsSpec::delay(rhs_fn(r.f));
                case RhsKind::GeneralDelay:
                    return RhsSpec::general_delay(rhs_fn(r.f));
                case RhsKind::Plain:
                    break;
            }
            return RhsSpec::plain(rhs_fn(r.f));
        }();
        if (config.certificate) rhs.envelopes = config.certificate->envelopes;

        ImpulseSchedule imp;
        const ImpulseBounds bounds = impulse_bounds(p);
        imp.l1 = bounds.l1;
        imp.l2 = bounds.l2;
        imp.l1_star = bounds.l1_star;
        for (const auto& ic : p.impulses) {
            imp.times.push_back(ic.time);
            imp.jumps.push_back([list = ic.jump](std::span<const double> x, std::span<double> out) {
                expr::Bindings b;
                b.state(x);
                for (std::size_t c = 0; c < list.size(); ++c) out[c] = expr::eval(list[c], b);
            });
        }

        std::optional<DelaySpec> delay;
        if (p.delay) {
            delay = DelaySpec{p.delay->r, [list = p.delay->history](double s, std::span<double> out) {
                                  expr::Bindings b;
                                  b.time(s);
                                  for (std::size_t c = 0; c < list.size(); ++c) out[c] = expr::eval(list[c], b);
                              }};
        }
        return ProblemSpec(FractionalOrder(p.alpha), p.T, p.x0.value_or(State{}), std::move(rhs), std::move(imp),
                           std::move(delay));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError("problem", e.what());
    }
}

RunConfig example_config(std::string_view name) {
    RunConfig c;
    c.numerics.target_h = 1.0 / 1024.0;
    ProblemConfig& p = c.problem;
    p.alpha = 0.5;
    p.T = 1.0;
    CertificateConfig cert;
    if (name == "logistic") {
        p.x0 = State{0.1};
        p.rhs.builtin = "logistic";
        p.rhs.params = {{"a", expr::parse("1")}, {"b", expr::parse("1")}};
        p.impulses = {{0.3, {expr::parse("0.05")}}, {0.6, {expr::parse("0.05")}}};
        cert.gronwall = GronwallConfig{1.0, 1.0};
    } else if (name == "delay-exp" || name == "delay-plain") {
        c.comment = "impulse time t1 = 0.5, delay r = 0.5 and history phi(t) = -t are editable choices";
        p.delay = DelayConfig{0.5, {expr::parse("-t")}};
        p.impulses = {{0.5, {expr::parse("0.5")}}};
        if (name == "delay-exp") {
            p.rhs.builtin = "delay-exp";
            p.rhs.params = {{"nu", expr::parse("1")}};
            cert.envelopes.L2 = EnvelopeFn::exp_decay(0.5, 1.0);
            cert.envelopes.M3 = EnvelopeFn::exp_decay(0.5, 1.0);
        } else {
            p.rhs.builtin = "delay-plain";
            cert.envelopes.M4 = EnvelopeFn::exp_decay(0.25, 1.0);
        }
    } else {
        std::string names;
        for (const auto& n : kExampleNames) names += (names.empty() ? "" : ", ") + n;
        throw ConfigError("", "unknown example '" + std::string(name) + "' (valid: " + names + ")");
    }
    expand_builtin(p.rhs, "problem.rhs");
    c.certificate = std::move(cert);
    return c;
}

}  // namespace fracimp::cli

#include "fracimp/exprlang.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "fracimp/errors.hpp"

namespace fracimp::expr {

namespace {

constexpr std::array<std::pair<std::string_view, Func>, 6> kFunctions = {{
    {"exp", Func::Exp},
    {"sin", Func::Sin},
    {"cos", Func::Cos},
    {"abs", Func::Abs},
    {"sqrt", Func::Sqrt},
    {"ln", Func::Ln},
}};

NodePtr make(auto&& alt) { return std::make_shared<const Node>(Node{std::forward<decltype(alt)>(alt)}); }

// Recognizes t, xtsup, x, xN, xr, xrN with N >= 1.
std::optional<Variable> resolve_variable(std::string_view name) {
    if (name == "t") return Variable{VarKind::Time, 0, std::string(name)};
    if (name == "xtsup") return Variable{VarKind::HistorySup, 0, std::string(name)};
    VarKind kind;
    std::string_view digits;
    if (name.starts_with("xr")) {
        kind = VarKind::Delayed;
        digits = name.substr(2);
    } else if (name.starts_with("x")) {
        kind = VarKind::State;
        digits = name.substr(1);
    } else {
        return std::nullopt;
    }
    if (digits.empty()) return Variable{kind, 0, std::string(name)};
    if (digits.front() == '0') return std::nullopt;
    std::size_t index = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || index == 0) return std::nullopt;
    return Variable{kind, index - 1, std::string(name)};
}

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    Expr run() {
        NodePtr e = parse_expr();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
        return Expr(std::move(e));
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw ParseError("syntax error: " + what, pos_); }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (accept('+')) {
                lhs = make(Binary{BinaryOp::Add, lhs, parse_term()});
            } else if (accept('-')) {
                lhs = make(Binary{BinaryOp::Sub, lhs, parse_term()});
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (accept('*')) {
                lhs = make(Binary{BinaryOp::Mul, lhs, parse_unary()});
            } else if (accept('/')) {
                lhs = make(Binary{BinaryOp::Div, lhs, parse_unary()});
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_unary() {
        if (accept('-')) return make(Negate{parse_unary()});
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        if (accept('^')) return make(Binary{BinaryOp::Pow, base, parse_unary()});
        return base;
    }

    NodePtr parse_primary() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of input");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = parse_expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        fail("unexpected '" + std::string(1, c) + "'");
    }

    NodePtr parse_number() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
            if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
                pos_ = look;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            }
        }
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
        if (ec != std::errc{} || ptr != src_.data() + pos_) {
            pos_ = start;
            fail("malformed number '" + std::string(src_.substr(start, pos_ - start)) + "'");
        }
        return make(Number{value});
    }

    NodePtr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
        const std::string_view name = src_.substr(start, pos_ - start);
        for (const auto& [fname, f] : kFunctions) {
            if (name == fname) {
                if (!accept('(')) fail("expected '(' after function '" + std::string(name) + "'");
                NodePtr arg = parse_expr();
                if (!accept(')')) fail("expected ')' closing call to '" + std::string(name) + "'");
                return make(Call{f, arg});
            }
        }
        if (auto var = resolve_variable(name)) return make(std::move(*var));
        throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

bool nodes_equal(const Node& a, const Node& b) {
    if (a.v.index() != b.v.index()) return false;
    return std::visit(
        [&b](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.v);
            if constexpr (std::is_same_v<T, Number>) {
                return x.value == y.value || (std::isnan(x.value) && std::isnan(y.value));
            } else if constexpr (std::is_same_v<T, Variable>) {
                return x.kind == y.kind && x.component == y.component;
            } else if constexpr (std::is_same_v<T, Negate>) {
                return nodes_equal(*x.operand, *y.operand);
            } else if constexpr (std::is_same_v<T, Binary>) {
                return x.op == y.op && nodes_equal(*x.lhs, *y.lhs) && nodes_equal(*x.rhs, *y.rhs);
            } else {
                return x.func == y.func && nodes_equal(*x.arg, *y.arg);
            }
        },
        a.v);
}

// Printing precedence levels.
constexpr int kPrecAdd = 1;
constexpr int kPrecMul = 2;
constexpr int kPrecNeg = 3;
constexpr int kPrecPow = 4;
constexpr int kPrecAtom = 5;

int precedence(const Node& n) {
    if (const auto* b = std::get_if<Binary>(&n.v)) {
        switch (b->op) {
            case BinaryOp::Add:
            case BinaryOp::Sub:
                return kPrecAdd;
            case BinaryOp::Mul:
            case BinaryOp::Div:
                return kPrecMul;
            case BinaryOp::Pow:
                return kPrecPow;
        }
    }
    if (std::holds_alternative<Negate>(n.v)) return kPrecNeg;
    return kPrecAtom;
}

char op_char(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add:
            return '+';
        case BinaryOp::Sub:
            return '-';
        case BinaryOp::Mul:
            return '*';
        case BinaryOp::Div:
            return '/';
        case BinaryOp::Pow:
            return '^';
    }
    return '?';
}

void print(const Node& n, std::string& out);

void print_wrapped(const Node& n, bool parens, std::string& out) {
    if (parens) out += '(';
    print(n, out);
    if (parens) out += ')';
}

void print(const Node& n, std::string& out) {
    std::visit(
        [&out](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Number>) {
                std::array<char, 32> buf{};
                const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x.value);
                out.append(buf.data(), res.ptr);
            } else if constexpr (std::is_same_v<T, Variable>) {
                out += x.spelling.empty() ? std::string(var_kind_name(x.kind)) + std::to_string(x.component + 1)
                                          : x.spelling;
            } else if constexpr (std::is_same_v<T, Negate>) {
                out += '-';
                print_wrapped(*x.operand, precedence(*x.operand) < kPrecNeg, out);
            } else if constexpr (std::is_same_v<T, Binary>) {
                const int lp = precedence(*x.lhs);
                const int rp = precedence(*x.rhs);
                if (x.op == BinaryOp::Pow) {
                    print_wrapped(*x.lhs, lp < kPrecAtom, out);
                    out += '^';
                    print_wrapped(*x.rhs, rp < kPrecNeg, out);
                } else {
                    const int p = precedence(Node{x});
                    print_wrapped(*x.lhs, lp < p, out);
                    out += ' ';
                    out += op_char(x.op);
                    out += ' ';
                    print_wrapped(*x.rhs, rp <= p, out);
                }
            } else {
                out += func_name(x.func);
                out += '(';
                print(*x.arg, out);
                out += ')';
            }
        },
        n.v);
}

std::string describe(const Node& n) {
    std::string s;
    print(n, s);
    return s;
}

[[noreturn]] void eval_fail(const std::string& what, const Node& n) {
    throw EvalError(what + " in '" + describe(n) + "'");
}

double eval_node(const Node& n, const Bindings& env) {
    const double result = std::visit(
        [&env, &n](const auto& x) -> double {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Number>) {
                return x.value;
            } else if constexpr (std::is_same_v<T, Variable>) {
                return env.lookup(x);
            } else if constexpr (std::is_same_v<T, Negate>) {
                return -eval_node(*x.operand, env);
            } else if constexpr (std::is_same_v<T, Binary>) {
                const double a = eval_node(*x.lhs, env);
                const double b = eval_node(*x.rhs, env);
                switch (x.op) {
                    case BinaryOp::Add:
                        return a + b;
                    case BinaryOp::Sub:
                        return a - b;
                    case BinaryOp::Mul:
                        return a * b;
                    case BinaryOp::Div:
                        if (b == 0.0) eval_fail("division by zero", n);
                        return a / b;
                    case BinaryOp::Pow:
                        if (a < 0.0 && b != std::trunc(b)) eval_fail("negative base with non-integer exponent", n);
                        if (a == 0.0 && b < 0.0) eval_fail("zero raised to a negative power", n);
                        return std::pow(a, b);
                }
                return 0.0;
            } else {
                const double a = eval_node(*x.arg, env);
                switch (x.func) {
                    case Func::Exp:
                        return std::exp(a);
                    case Func::Sin:
                        return std::sin(a);
                    case Func::Cos:
                        return std::cos(a);
                    case Func::Abs:
                        return std::abs(a);
                    case Func::Sqrt:
                        if (a < 0.0) eval_fail("sqrt of negative value", n);
                        return std::sqrt(a);
                    case Func::Ln:
                        if (!(a > 0.0)) eval_fail("ln of nonpositive value", n);
                        return std::log(a);
                }
                return 0.0;
            }
        },
        n.v);
    if (!std::isfinite(result)) eval_fail("non-finite result", n);
    return result;
}

void collect(const Node& n, VariableUse& use) {
    std::visit(
        [&use](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Variable>) {
                use.kinds.insert(x.kind);
                if (x.kind == VarKind::State) use.max_state_component = std::max(use.max_state_component, x.component + 1);
                if (x.kind == VarKind::Delayed)
                    use.max_delayed_component = std::max(use.max_delayed_component, x.component + 1);
            } else if constexpr (std::is_same_v<T, Negate>) {
                collect(*x.operand, use);
            } else if constexpr (std::is_same_v<T, Binary>) {
                collect(*x.lhs, use);
                collect(*x.rhs, use);
            } else if constexpr (std::is_same_v<T, Call>) {
                collect(*x.arg, use);
            }
        },
        n.v);
}

}  // namespace

Expr Expr::number(double v) { return Expr(make(Number{v})); }

Expr Expr::variable(VarKind kind, std::size_t component) {
    std::string spelling;
    switch (kind) {
        case VarKind::Time:
            spelling = "t";
            break;
        case VarKind::HistorySup:
            spelling = "xtsup";
            break;
        case VarKind::State:
            spelling = component == 0 ? "x" : "x" + std::to_string(component + 1);
            break;
        case VarKind::Delayed:
            spelling = component == 0 ? "xr" : "xr" + std::to_string(component + 1);
            break;
    }
    return Expr(make(Variable{kind, component, std::move(spelling)}));
}

Expr Expr::negate(const Expr& e) { return Expr(make(Negate{e.root_})); }

Expr Expr::binary(BinaryOp op, const Expr& lhs, const Expr& rhs) { return Expr(make(Binary{op, lhs.root_, rhs.root_})); }

Expr Expr::call(Func f, const Expr& arg) { return Expr(make(Call{f, arg.root_})); }

bool operator==(const Expr& a, const Expr& b) {
    if (a.empty() || b.empty()) return a.empty() && b.empty();
    return nodes_equal(a.root(), b.root());
}

Expr parse(std::string_view source) { return Parser(source).run(); }

Bindings Bindings::from_map(const std::map<std::string, double>& values) {
    Bindings b;
    auto xs = std::make_shared<std::vector<double>>();
    auto xrs = std::make_shared<std::vector<double>>();
    for (const auto& [name, value] : values) {
        const auto var = resolve_variable(name);
        if (!var) throw EvalError("unknown variable name '" + name + "' in bindings");
        switch (var->kind) {
            case VarKind::Time:
                b.t_ = value;
                break;
            case VarKind::HistorySup:
                b.xtsup_ = value;
                break;
            case VarKind::State:
                if (xs->size() <= var->component) xs->resize(var->component + 1, std::nan(""));
                (*xs)[var->component] = value;
                b.has_x_ = true;
                break;
            case VarKind::Delayed:
                if (xrs->size() <= var->component) xrs->resize(var->component + 1, std::nan(""));
                (*xrs)[var->component] = value;
                b.has_xr_ = true;
                break;
        }
    }
    b.owned_x_ = xs;
    b.owned_xr_ = xrs;
    b.x_ = *xs;
    b.xr_ = *xrs;
    return b;
}

double Bindings::lookup(const Variable& v) const {
    const auto unbound = [&v]() -> double { throw EvalError("unbound variable '" + v.spelling + "'"); };
    switch (v.kind) {
        case VarKind::Time:
            return t_ ? *t_ : unbound();
        case VarKind::HistorySup:
            return xtsup_ ? *xtsup_ : unbound();
        case VarKind::State:
            if (!has_x_ || v.component >= x_.size() || std::isnan(x_[v.component])) return unbound();
            return x_[v.component];
        case VarKind::Delayed:
            if (!has_xr_ || v.component >= xr_.size() || std::isnan(xr_[v.component])) return unbound();
            return xr_[v.component];
    }
    return unbound();
}

double eval(const Expr& e, const Bindings& env) {
    if (e.empty()) throw EvalError("empty expression");
    return eval_node(e.root(), env);
}

std::string to_string(const Expr& e) {
    if (e.empty()) return {};
    return describe(e.root());
}

VariableUse variables(const Expr& e) {
    VariableUse use;
    if (!e.empty()) collect(e.root(), use);
    return use;
}

std::string_view func_name(Func f) {
    for (const auto& [name, fn] : kFunctions)
        if (fn == f) return name;
    return "?";
}

std::string_view var_kind_name(VarKind k) {
    switch (k) {
        case VarKind::Time:
            return "t";
        case VarKind::State:
            return "x";
        case VarKind::Delayed:
            return "xr";
        case VarKind::HistorySup:
            return "xtsup";
    }
    return "?";
}

}  // namespace fracimp::expr

#pragma once

// Arithmetic expressions for right-hand sides, impulse maps and histories.
//
// Grammar (lowest to highest precedence):
//
//   expr    := term   (('+' | '-') term)*        left-associative
//   term    := unary  (('*' | '/') unary)*       left-associative
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?              right-associative
//   primary := number | variable | func '(' expr ')' | '(' expr ')'
//
// Variables: t, x (alias x1), x1..xd, xr (alias xr1), xr1..xrd, xtsup.
// Functions: exp sin cos abs sqrt ln.

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fracimp::expr {

enum class VarKind { Time, State, Delayed, HistorySup };

enum class BinaryOp { Add, Sub, Mul, Div, Pow };

enum class Func { Exp, Sin, Cos, Abs, Sqrt, Ln };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Number {
    double value;
};

struct Variable {
    VarKind kind;
    std::size_t component;  // 0-based; 0 for t and xtsup
    std::string spelling;   // as written, for printing
};

struct Negate {
    NodePtr operand;
};

struct Binary {
    BinaryOp op;
    NodePtr lhs;
    NodePtr rhs;
};

struct Call {
    Func func;
    NodePtr arg;
};

struct Node {
    std::variant<Number, Variable, Negate, Binary, Call> v;
};

/// Immutable, shareable expression tree.
class Expr {
public:
    Expr() = default;
    explicit Expr(NodePtr root) : root_(std::move(root)) {}

    const Node& root() const { return *root_; }
    bool empty() const { return root_ == nullptr; }

    static Expr number(double v);
    static Expr variable(VarKind kind, std::size_t component = 0);
    static Expr negate(const Expr& e);
    static Expr binary(BinaryOp op, const Expr& lhs, const Expr& rhs);
    static Expr call(Func f, const Expr& arg);

private:
    NodePtr root_;
};

/// Structural equality: same shape, same operators, same literal values,
/// same variable kind and component (spelling "x" vs "x1" is not significant).
bool operator==(const Expr& a, const Expr& b);

Expr parse(std::string_view source);

/// Values for the variables an expression may reference.
class Bindings {
public:
    Bindings& time(double t) {
        t_ = t;
        return *this;
    }
    Bindings& state(std::span<const double> x) {
        x_ = x;
        has_x_ = true;
        return *this;
    }
    Bindings& delayed(std::span<const double> xr) {
        xr_ = xr;
        has_xr_ = true;
        return *this;
    }
    Bindings& history_sup(double v) {
        xtsup_ = v;
        return *this;
    }

    /// Build from name -> value pairs ("t", "x", "x2", "xr", "xtsup", ...).
    /// The returned object owns the storage for state vectors.
    static Bindings from_map(const std::map<std::string, double>& values);

    double lookup(const Variable& v) const;

private:
    std::optional<double> t_;
    std::span<const double> x_;
    std::span<const double> xr_;
    bool has_x_ = false;
    bool has_xr_ = false;
    std::optional<double> xtsup_;
    std::shared_ptr<std::vector<double>> owned_x_;
    std::shared_ptr<std::vector<double>> owned_xr_;
};

/// Evaluates with real semantics; division by zero, sqrt/ln outside their
/// domain, negative base with non-integer exponent, and non-finite results
/// throw EvalError naming the offending subexpression.
double eval(const Expr& e, const Bindings& env);

/// Minimal-parenthesis rendering that re-parses to a structurally equal tree.
std::string to_string(const Expr& e);

struct VariableUse {
    std::set<VarKind> kinds;
    std::size_t max_state_component = 0;    // 1 + largest x component, 0 if none
    std::size_t max_delayed_component = 0;  // 1 + largest xr component, 0 if none
};

VariableUse variables(const Expr& e);

std::string_view func_name(Func f);
std::string_view var_kind_name(VarKind k);

}  // namespace fracimp::expr

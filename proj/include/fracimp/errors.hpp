#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fracimp {

/// Argument outside the mathematical domain of an operation (x <= 0 for
/// gamma, p >= alpha for the Hoelder constant, t outside [0,T], ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Argument inside the domain but outside the range we evaluate accurately.
class RangeError : public std::range_error {
public:
    using std::range_error::range_error;
};

/// Mesh construction cannot honour the requested step.
class RefinementError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A bound whose denominator is nonpositive (Schaefer bound with q >= 1).
class BoundNotApplicable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Syntax or name error in an expression source, with a byte offset.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t position)
        : std::runtime_error(what + " at position " + std::to_string(position)),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Runtime arithmetic failure or unbound variable during expression evaluation.
class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent problem data (bad order, unsorted impulses, ...).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Failure inside a solve (right-hand side or jump evaluation), tagged with the node.
class SolveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fracimp

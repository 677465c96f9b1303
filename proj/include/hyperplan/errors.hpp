#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hyperplan {

/// Base class of everything the library throws on bad input.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text: TS documents, formulas, PDDL, controller JSON.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line), column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Well-formed text that violates a model invariant (undeclared ids, partial kappa, ...).
class SemanticError : public Error {
public:
    using Error::Error;
};

/// Body outside the fragment an operation requires.
class ClassificationError : public Error {
public:
    using Error::Error;
};

/// Input outside what the built-in machinery handles (General prefixes, POND in PDDL, ...).
class UnsupportedError : public Error {
public:
    using Error::Error;
};

/// A configured cap (automaton states, beliefs, enumeration work) was exceeded.
class ResourceError : public Error {
public:
    using Error::Error;
};

/// A bounded check could not decide its question within the given horizon.
class IndeterminateError : public Error {
public:
    using Error::Error;
};

} // namespace hyperplan

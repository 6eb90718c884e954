#pragma once

#include <stdexcept>
#include <string>

namespace sonarpath {

// Base for every error the library raises. The C API maps each subclass to a
// distinct status code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An id that does not resolve (unknown container, fact, rule, scenario...).
class ReferenceError : public Error {
public:
    using Error::Error;
};

// A well-formed document whose content breaks a model invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Malformed model/report text. Carries the 1-based line and column when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line = 0, int column = 0)
        : Error(what), line_(line), column_(column) {}

    [[nodiscard]] int line() const noexcept { return line_; }
    [[nodiscard]] int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

// The exhaustive oracle refuses models above its size guard.
class GuardError : public Error {
public:
    using Error::Error;
};

} // namespace sonarpath

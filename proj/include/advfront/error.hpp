#pragma once

#include <stdexcept>
#include <string>

namespace advfront {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Matrix or model dimensions do not line up.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Caller-supplied data violates a precondition (label range, empty set, ...).
class InputError : public Error {
public:
    using Error::Error;
};

/// A NaN or Inf showed up in an intermediate value.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration (flags, transform parameters, fractions).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed file contents. Carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    explicit ParseError(const std::string& what) : Error(what) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_ = 0;
};

/// An argument breaks a documented contract (e.g. non-monotone frontier
/// handed to the hypervolume routine).
class ContractError : public Error {
public:
    using Error::Error;
};

}  // namespace advfront

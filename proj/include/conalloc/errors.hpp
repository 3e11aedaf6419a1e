#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace conalloc {

/// Base of every error thrown by the library. The CLI maps subclasses onto
/// exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

class DegeneracyError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    explicit ParseError(const std::string& what) : Error(what), line_(0) {}

    /// 1-based line number, 0 when the error is not tied to a line.
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ConsistencyError : public Error {
public:
    using Error::Error;
};

class PoleError : public Error {
public:
    using Error::Error;
};

/// An intermediate boundary image left the open upper half-plane; the
/// boundary sampling is too coarse for the geometry.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

/// The map chain overflowed (parameters or images no longer finite).
class CrowdingError : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

class ResolutionError : public Error {
public:
    using Error::Error;
};

} // namespace conalloc

#pragma once

#include <stdexcept>
#include <string>

namespace gec {

/// Base of all library errors. The CLI maps the subclasses onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or malformed configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Dimension or enumeration size beyond the desk-scale cap.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Wall-clock budget exhausted before a computation finished.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

/// Zero spectral width, empty sample, or similar degenerate input.
class DegenerateError : public Error {
public:
    using Error::Error;
};

/// Iterative numerical method failed to converge.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw ConfigError(what);
}

}  // namespace gec

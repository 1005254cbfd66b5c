#pragma once

#include <stdexcept>
#include <string>

namespace cirad {

/// Raised when an input violates a documented precondition or invariant.
/// The CLI maps this to exit status 1.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised for failures that are not the caller's fault (I/O, numerical breakdown).
/// The CLI maps this to exit status 2.
class RuntimeError : public std::runtime_error {
public:
    explicit RuntimeError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cirad

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace splitting {

/// Invalid user input: bad parameters, mismatched dimensions, malformed
/// operator data. Raised before any iteration runs.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical routine could not produce a trustworthy answer
/// (singular system, non-finite intermediate).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Backtracking exhausted its trial budget without meeting the acceptance test.
class LineSearchFailure : public std::runtime_error {
public:
    LineSearchFailure(const std::string& what, std::size_t trials)
        : std::runtime_error(what), trials_(trials) {}

    std::size_t trials() const noexcept { return trials_; }

private:
    std::size_t trials_;
};

/// An invariant that theory guarantees was observed broken, e.g. an empty
/// intersection of two halfspaces that must both contain the solution set.
class InvariantViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace splitting

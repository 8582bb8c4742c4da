#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace alpha {

/// Inconsistent or invalid run configuration (bad flags, preset/regularizer clash, ...).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed input data. `line()` is 1-based, 0 when not tied to a line.
class DataError : public std::runtime_error {
public:
    DataError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// The atom enumeration of a sampling would exceed the configured cap.
class AtomCapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace alpha

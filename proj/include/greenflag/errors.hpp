#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace greenflag {

/// Argument outside the physical domain of a model equation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed scenario configuration or CLI input (exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written (exit code 3).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Weather CSV content error; carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace greenflag

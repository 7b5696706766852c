// Error taxonomy shared across the library and the CLI.
//
// ConfigError    -> invalid user input / schema violation (CLI exit code 2);
//                   carries the offending field name so callers can report it.
// NumericalError -> a computation failed to converge, hit a guard (NaN,
//                   near-collision, node-count mismatch, ...) (CLI exit 3).

#pragma once

#include <stdexcept>
#include <string>

namespace wc {

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field.empty() ? message : field + ": " + message),
          field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& message)
        : std::runtime_error(message) {}
};

}  // namespace wc

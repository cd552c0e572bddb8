#pragma once

#include <stdexcept>
#include <string>

namespace lrwell {

/// Input outside the mathematical domain of an operation (non-positive mass,
/// time outside the configured window, ...).
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Argument outside the documented working range (|z| > 40, k > 50, ...).
class range_error : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// An iterative method failed: non-convergence, zero pivot, divergence.
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed run configuration. Carries the offending field and, when known,
/// the 1-based line in the configuration file.
class config_error : public std::runtime_error {
public:
    config_error(std::string field, const std::string& message, int line = -1)
        : std::runtime_error(format(field, message, line)), field_(std::move(field)), message_(message), line_(line) {}

    const std::string& field() const noexcept { return field_; }
    const std::string& message() const noexcept { return message_; }
    int line() const noexcept { return line_; }

private:
    static std::string format(const std::string& field, const std::string& message, int line) {
        std::string out = "config error";
        if (line > 0) out += " (line " + std::to_string(line) + ")";
        out += ": '" + field + "': " + message;
        return out;
    }

    std::string field_;
    std::string message_;
    int line_;
};

}  // namespace lrwell

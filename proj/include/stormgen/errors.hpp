#pragma once

#include <stdexcept>
#include <string>

namespace stormgen {

// Error category, used by the CLI to pick an exit code:
// domain errors exit 1, usage/IO errors exit 2.
enum class ErrorKind { domain, io, usage };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void throw_domain(const std::string& message) {
    throw Error(ErrorKind::domain, message);
}

[[noreturn]] inline void throw_io(const std::string& message) {
    throw Error(ErrorKind::io, message);
}

[[noreturn]] inline void throw_usage(const std::string& message) {
    throw Error(ErrorKind::usage, message);
}

} // namespace stormgen

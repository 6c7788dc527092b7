#pragma once

#include <stdexcept>
#include <string>

namespace ctxeval {

enum class ErrorCode {
    invalid_argument,
    parse_error,
    io_error,
    not_found,
    domain_error,
};

/// Exception carrying a machine-readable code alongside the message.
/// The C API maps these codes onto its integer status values.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace ctxeval

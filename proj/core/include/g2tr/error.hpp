#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace g2tr {

enum class ErrorCode {
    InvalidConfig,
    DimensionMismatch,
    MissingSideInput,
    MalformedSpec,
    BadMagic,
    BadVersion,
    BadHeader,
    TruncatedFile,
    LengthMismatch,
    Io,
    Internal,
};

std::string_view to_string(ErrorCode code) noexcept;

// All engine failures surface as this exception; the code is stable and is
// what the CLI maps onto exit statuses.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message) {}

    ErrorCode code() const noexcept { return code_; }

    // message without the code prefix
    const std::string& message() const noexcept { return message_; }

    // true for failures caused by the caller's input rather than the engine
    bool is_input_error() const noexcept { return code_ != ErrorCode::Internal; }

private:
    ErrorCode code_;
    std::string message_;
};

}  // namespace g2tr

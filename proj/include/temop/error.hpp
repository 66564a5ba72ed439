#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace temop {

enum class ErrorKind {
    InvalidInput,
    InsufficientData,
    InsufficientHistory,
    UndefinedMetric,
    Io,
    Parse,
    Corrupt,
    UnsupportedVersion,
    Internal,
};

inline std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidInput: return "invalid input";
    case ErrorKind::InsufficientData: return "insufficient data";
    case ErrorKind::InsufficientHistory: return "insufficient history";
    case ErrorKind::UndefinedMetric: return "undefined metric";
    case ErrorKind::Io: return "i/o error";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Corrupt: return "corrupt model file";
    case ErrorKind::UnsupportedVersion: return "unsupported version";
    case ErrorKind::Internal: return "internal error";
    }
    return "unknown error";
}

/// Every failure raised by the library carries one of the kinds above so
/// front ends can map it to a stable exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

} // namespace temop

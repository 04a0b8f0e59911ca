#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dsm {

enum class ErrorKind {
    InvalidArgument,
    NonFinite,
    SolveFailed,
    EigFailed,
    QuadratureFailed,
    NoConvergence,
    MissingConstants,
    MissingMonitor,
    ConditionViolated,
    PreconditionSampleFailed,
    DivisionByZero,
    NoConcaveSolution,
};

[[nodiscard]] constexpr std::string_view to_string(ErrorKind k) noexcept {
    switch (k) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::NonFinite: return "NonFinite";
        case ErrorKind::SolveFailed: return "SolveFailed";
        case ErrorKind::EigFailed: return "EigFailed";
        case ErrorKind::QuadratureFailed: return "QuadratureFailed";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::MissingConstants: return "MissingConstants";
        case ErrorKind::MissingMonitor: return "MissingMonitor";
        case ErrorKind::ConditionViolated: return "ConditionViolated";
        case ErrorKind::PreconditionSampleFailed: return "PreconditionSampleFailed";
        case ErrorKind::DivisionByZero: return "DivisionByZero";
        case ErrorKind::NoConcaveSolution: return "NoConcaveSolution";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a kind so callers (the CLI in
/// particular) can map it to an exit code without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

}  // namespace dsm

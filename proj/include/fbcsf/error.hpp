#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fbcsf {

enum class ErrorKind {
    NonConvex,
    NonClosing,
    DegenerateContinuum,
    OutOfSupport,
    LambdaOutOfRange,
    RhoTooLarge,
    BracketFailure,
    NoRoot,
    InvalidScale,
    TangentialContact,
    StepRejected,
    NonExtinction,
    WindowTooShort,
    NonPositiveAmplitude,
    InvalidArgument,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::NonConvex: return "NonConvex";
    case ErrorKind::NonClosing: return "NonClosing";
    case ErrorKind::DegenerateContinuum: return "DegenerateContinuum";
    case ErrorKind::OutOfSupport: return "OutOfSupport";
    case ErrorKind::LambdaOutOfRange: return "LambdaOutOfRange";
    case ErrorKind::RhoTooLarge: return "RhoTooLarge";
    case ErrorKind::BracketFailure: return "BracketFailure";
    case ErrorKind::NoRoot: return "NoRoot";
    case ErrorKind::InvalidScale: return "InvalidScale";
    case ErrorKind::TangentialContact: return "TangentialContact";
    case ErrorKind::StepRejected: return "StepRejected";
    case ErrorKind::NonExtinction: return "NonExtinction";
    case ErrorKind::WindowTooShort: return "WindowTooShort";
    case ErrorKind::NonPositiveAmplitude: return "NonPositiveAmplitude";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

/// Exception carrying a machine-readable kind alongside the message.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace fbcsf

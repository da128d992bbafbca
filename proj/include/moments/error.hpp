#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace moments {

enum class ErrorCode {
    DimensionMismatch,
    ShapeMismatch,
    ZeroTotalWeight,
    PreconditionViolated,
    ModeUnsupported,
    NotACore,
    WrongCodimension,
    WrongShape,
    FrameMismatch,
    DegenerateFrame,
    NotSymmetric,
    AsymmetricInput,
    ColumnNotInKernel,
    CoincidentPoints,
    OutOfRange,
    MaxIterations,
    SingularJacobian,
    InvalidInput,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ZeroTotalWeight: return "ZeroTotalWeight";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::ModeUnsupported: return "ModeUnsupported";
    case ErrorCode::NotACore: return "NotACore";
    case ErrorCode::WrongCodimension: return "WrongCodimension";
    case ErrorCode::WrongShape: return "WrongShape";
    case ErrorCode::FrameMismatch: return "FrameMismatch";
    case ErrorCode::DegenerateFrame: return "DegenerateFrame";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::AsymmetricInput: return "AsymmetricInput";
    case ErrorCode::ColumnNotInKernel: return "ColumnNotInKernel";
    case ErrorCode::CoincidentPoints: return "CoincidentPoints";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::InvalidInput: return "InvalidInput";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace moments

#include "pure/error.hpp"

namespace pure {

std::string_view error_name(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NotUnitDirection: return "NotUnitDirection";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::TooFewInstances: return "TooFewInstances";
    case ErrorCode::ZeroRow: return "ZeroRow";
    case ErrorCode::MissingClass: return "MissingClass";
    case ErrorCode::EmptyRecords: return "EmptyRecords";
    case ErrorCode::EmptyList: return "EmptyList";
    case ErrorCode::UnknownAttack: return "UnknownAttack";
    case ErrorCode::NoAttackedExamples: return "NoAttackedExamples";
    case ErrorCode::ZeroAccuracy: return "ZeroAccuracy";
    case ErrorCode::InconsistentRecord: return "InconsistentRecord";
    case ErrorCode::OverlappingOffsets: return "OverlappingOffsets";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::BadHeader: return "BadHeader";
    case ErrorCode::UnsupportedDtype: return "UnsupportedDtype";
    case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorCode::UnsupportedShape: return "UnsupportedShape";
    case ErrorCode::UnexpectedEof: return "UnexpectedEof";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ZeroMatrix: return "ZeroMatrix";
    }
    return "Unknown";
}

ErrorCategory error_category(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::BadMagic:
    case ErrorCode::BadHeader:
    case ErrorCode::UnsupportedDtype:
    case ErrorCode::UnsupportedOrder:
    case ErrorCode::UnsupportedShape:
    case ErrorCode::UnexpectedEof:
    case ErrorCode::IoFailure:
        return ErrorCategory::Io;
    case ErrorCode::RankDeficient:
    case ErrorCode::NoConvergence:
    case ErrorCode::ZeroMatrix:
        return ErrorCategory::Numerical;
    default:
        return ErrorCategory::Validation;
    }
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code)
{
}

Error Error::with_instance(std::size_t index) const
{
    std::string msg = what();
    // strip our own "<Name>: " prefix so it isn't doubled
    const auto prefix = std::string(name()) + ": ";
    if (msg.rfind(prefix, 0) == 0)
        msg.erase(0, prefix.size());
    Error e(code_, "instance " + std::to_string(index) + ": " + msg);
    e.instance_ = index;
    return e;
}

void fail(ErrorCode code, const std::string& what)
{
    throw Error(code, what);
}

}  // namespace pure

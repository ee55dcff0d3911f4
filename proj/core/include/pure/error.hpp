#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pure {

enum class ErrorCode {
    // validation
    InvalidArgument,
    InvalidConfig,
    InvalidK,
    ShapeMismatch,
    NotUnitDirection,
    TooFewRows,
    TooFewInstances,
    ZeroRow,
    MissingClass,
    EmptyRecords,
    EmptyList,
    UnknownAttack,
    NoAttackedExamples,
    ZeroAccuracy,
    InconsistentRecord,
    OverlappingOffsets,
    OutOfRange,
    DuplicateId,
    BadConfig,
    MalformedInput,
    // file format / io
    BadMagic,
    BadHeader,
    UnsupportedDtype,
    UnsupportedOrder,
    UnsupportedShape,
    UnexpectedEof,
    NonFinite,
    IoFailure,
    // numerical
    RankDeficient,
    NoConvergence,
    ZeroMatrix,
};

enum class ErrorCategory { Validation, Io, Numerical };

std::string_view error_name(ErrorCode code) noexcept;
ErrorCategory error_category(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);

    ErrorCode code() const noexcept { return code_; }
    std::string_view name() const noexcept { return error_name(code_); }
    ErrorCategory category() const noexcept { return error_category(code_); }

    // Set by batch operations to the index of the instance that failed.
    std::optional<std::size_t> instance_index() const noexcept { return instance_; }
    Error with_instance(std::size_t index) const;

private:
    ErrorCode code_;
    std::optional<std::size_t> instance_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace pure

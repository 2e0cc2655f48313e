#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace seabed {

enum class ErrorCode {
    // ingestion
    MalformedRow,
    NonContiguousColumn,
    DuplicateBoreholeInterval,
    DuplicateId,
    UnknownStratum,
    UnknownBorehole,
    StratumOrderViolation,
    SizeMismatch,
    BadSpacing,
    NonFiniteValue,
    BadHeader,
    Io,
    // geometry
    TooFewPoints,
    DuplicatePoints,
    CollinearInput,
    StratumNotFound,
    NotAHeightField,
    NonPositiveRadius,
    // fence
    SurveyLineNotFound,
    BoreholeMissing,
    // isosurface
    FieldTooSmall,
    NonFiniteIso,
    DegenerateGradient,
    // volume
    CoordinateOutOfRange,
    BadStep,
    DegenerateCamera,
    BadTransferFunction,
    // particles
    BadSpillConfig,
    // export
    DegenerateExtent,
    EmptyScene,
    EmptyMesh,
    // lookups
    FieldNotFound,
    BadArgument,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::NonContiguousColumn: return "NonContiguousColumn";
    case ErrorCode::DuplicateBoreholeInterval: return "DuplicateBoreholeInterval";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::UnknownStratum: return "UnknownStratum";
    case ErrorCode::UnknownBorehole: return "UnknownBorehole";
    case ErrorCode::StratumOrderViolation: return "StratumOrderViolation";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::BadSpacing: return "BadSpacing";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::BadHeader: return "BadHeader";
    case ErrorCode::Io: return "Io";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::DuplicatePoints: return "DuplicatePoints";
    case ErrorCode::CollinearInput: return "CollinearInput";
    case ErrorCode::StratumNotFound: return "StratumNotFound";
    case ErrorCode::NotAHeightField: return "NotAHeightField";
    case ErrorCode::NonPositiveRadius: return "NonPositiveRadius";
    case ErrorCode::SurveyLineNotFound: return "SurveyLineNotFound";
    case ErrorCode::BoreholeMissing: return "BoreholeMissing";
    case ErrorCode::FieldTooSmall: return "FieldTooSmall";
    case ErrorCode::NonFiniteIso: return "NonFiniteIso";
    case ErrorCode::DegenerateGradient: return "DegenerateGradient";
    case ErrorCode::CoordinateOutOfRange: return "CoordinateOutOfRange";
    case ErrorCode::BadStep: return "BadStep";
    case ErrorCode::DegenerateCamera: return "DegenerateCamera";
    case ErrorCode::BadTransferFunction: return "BadTransferFunction";
    case ErrorCode::BadSpillConfig: return "BadSpillConfig";
    case ErrorCode::DegenerateExtent: return "DegenerateExtent";
    case ErrorCode::EmptyScene: return "EmptyScene";
    case ErrorCode::EmptyMesh: return "EmptyMesh";
    case ErrorCode::FieldNotFound: return "FieldNotFound";
    case ErrorCode::BadArgument: return "BadArgument";
    }
    return "Unknown";
}

/// Every failure raised by the toolkit. `code()` is stable and is what the
/// service and CLI map to HTTP statuses and exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message) {}

    ErrorCode code() const noexcept { return code_; }
    /// The text without the code prefix.
    const std::string& message() const noexcept { return message_; }

private:
    ErrorCode code_;
    std::string message_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace seabed

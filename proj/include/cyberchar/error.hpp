#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cyberchar {

enum class ErrorCode {
    InvalidArgument,
    ConfigError,
    IoError,
    FormatError,
    Unreachable,
    InsufficientShutdown,
    TooShort,
    FrameTooShort,
    InsufficientData,
    AllNull,
    DimensionMismatch,
    SingleClass,
    NaNFeature,
    OverlappingWindows,
    MissingTemplate,
    IntervalOutsideFrame,
    MissingDataset,
    UndefinedAuc,
    LabelOutOfRange,
    EmptyGrid,
    DisjointTimeRanges,
    InvariantViolation,
};

std::string_view error_code_name(ErrorCode code) noexcept;

/// Process exit status for an error: 2 config, 3 data, 4 internal invariant.
int exit_code_for(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Raised by rebalancing when the requested ratio cannot be met.
class InsufficientDataError : public Error {
public:
    InsufficientDataError(const std::string& message, double achievable_ratio)
        : Error(ErrorCode::InsufficientData, message), achievable_(achievable_ratio) {}

    double achievable_ratio() const noexcept { return achievable_; }

private:
    double achievable_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
    if (!condition) {
        throw Error(code, message);
    }
}

}  // namespace cyberchar

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace svar {

enum class ErrorCode {
    NonPositiveValue,
    EmptyWindow,
    NoOverlap,
    NoCompleteQuarter,
    TooShort,
    TooFewObservations,
    SingularDesign,
    NotPositiveDefinite,
    ZeroImpact,
    ReplicationFailure,
    BlockTooLong,
    UnstableModel,
    InvalidArgument,
    HttpError,
    ParseError,
    GapError,
    MissingApiKey,
    CacheMiss,
    ConfigError,
    IoError,
    InvariantViolation,
};

std::string_view to_string(ErrorCode code);

/// Exception type for every failure raised by the library. The code is stable and
/// machine-readable; the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace svar

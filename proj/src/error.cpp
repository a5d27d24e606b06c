#include "svar/error.hpp"

namespace svar {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonPositiveValue: return "NonPositiveValue";
        case ErrorCode::EmptyWindow: return "EmptyWindow";
        case ErrorCode::NoOverlap: return "NoOverlap";
        case ErrorCode::NoCompleteQuarter: return "NoCompleteQuarter";
        case ErrorCode::TooShort: return "TooShort";
        case ErrorCode::TooFewObservations: return "TooFewObservations";
        case ErrorCode::SingularDesign: return "SingularDesign";
        case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorCode::ZeroImpact: return "ZeroImpact";
        case ErrorCode::ReplicationFailure: return "ReplicationFailure";
        case ErrorCode::BlockTooLong: return "BlockTooLong";
        case ErrorCode::UnstableModel: return "UnstableModel";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::HttpError: return "HttpError";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::GapError: return "GapError";
        case ErrorCode::MissingApiKey: return "MissingApiKey";
        case ErrorCode::CacheMiss: return "CacheMiss";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::InvariantViolation: return "InvariantViolation";
    }
    return "Unknown";
}

}  // namespace svar

#include "kgc/error.hpp"

namespace kgc {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::EmptyDataset: return "EmptyDataset";
        case ErrorCode::UnknownFineLabel: return "UnknownFineLabel";
        case ErrorCode::InvalidProbability: return "InvalidProbability";
        case ErrorCode::InvalidScore: return "InvalidScore";
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::ScheduleExhausted: return "ScheduleExhausted";
        case ErrorCode::ReversalOutOfRange: return "ReversalOutOfRange";
        case ErrorCode::InvalidWeight: return "InvalidWeight";
        case ErrorCode::ProfileError: return "ProfileError";
        case ErrorCode::ManifestParseError: return "ManifestParseError";
        case ErrorCode::ScoreFileParseError: return "ScoreFileParseError";
        case ErrorCode::PlanMismatch: return "PlanMismatch";
        case ErrorCode::ShapeError: return "ShapeError";
        case ErrorCode::NonFiniteWeights: return "NonFiniteWeights";
        case ErrorCode::DegenerateLabels: return "DegenerateLabels";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::UnfairComparison: return "UnfairComparison";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace kgc

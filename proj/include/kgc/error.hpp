#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kgc {

enum class ErrorCode {
    EmptyDataset,
    UnknownFineLabel,
    InvalidProbability,
    InvalidScore,
    InvalidParams,
    ScheduleExhausted,
    ReversalOutOfRange,
    InvalidWeight,
    ProfileError,
    ManifestParseError,
    ScoreFileParseError,
    PlanMismatch,
    ShapeError,
    NonFiniteWeights,
    DegenerateLabels,
    ConfigError,
    UnfairComparison,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so the
// CLI can emit a machine-readable record.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace kgc

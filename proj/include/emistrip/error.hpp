#pragma once

#include <stdexcept>
#include <string>

namespace emistrip {

enum class ErrorCode {
    NotAscending,
    AdjacentRows,
    OutOfRange,
    DegenerateStrip,
    Infeasible,
    DimensionMismatch,
    PatternMismatch,
    InvalidArgument,
    ZeroVariance,
    TooFewSamples,
    UndefinedMetric,
    ParseError,
    IoError,
};

/// Exception carrying a machine-readable code alongside the message.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    /// True for errors caused by file access rather than bad data.
    bool is_io() const noexcept { return code_ == ErrorCode::IoError; }

private:
    ErrorCode code_;
};

const char* error_code_name(ErrorCode code);

} // namespace emistrip

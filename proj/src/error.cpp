#include "emistrip/error.hpp"

namespace emistrip {

const char* error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::NotAscending: return "NotAscending";
    case ErrorCode::AdjacentRows: return "AdjacentRows";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DegenerateStrip: return "DegenerateStrip";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::PatternMismatch: return "PatternMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::UndefinedMetric: return "UndefinedMetric";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

} // namespace emistrip

#include "herdlens/error.hpp"

namespace herdlens {

const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::ManifestMismatch: return "ManifestMismatch";
    case ErrorCode::SumMismatch: return "SumMismatch";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::NoMasks: return "NoMasks";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::TooFewFeatures: return "TooFewFeatures";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::NoUsableFrames: return "NoUsableFrames";
    case ErrorCode::DegenerateBBox: return "DegenerateBBox";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::MissingSocialLabel: return "MissingSocialLabel";
    case ErrorCode::MissingViewLabel: return "MissingViewLabel";
    case ErrorCode::MissingImagery: return "MissingImagery";
    case ErrorCode::LowConfidenceNose: return "LowConfidenceNose";
    case ErrorCode::OutOfFrame: return "OutOfFrame";
    case ErrorCode::Schema: return "SchemaError";
    }
    return "Unknown";
}

} // namespace herdlens

#ifndef HERDLENS_ERROR_HPP
#define HERDLENS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace herdlens {

enum class ErrorCode {
    InvalidArgument,
    Io,
    ParseError,
    InvariantViolation,
    ManifestMismatch,
    SumMismatch,
    Overflow,
    EmptyMask,
    NoMasks,
    DimensionMismatch,
    TooFewPoints,
    TooFewFeatures,
    TooFewSamples,
    NoUsableFrames,
    DegenerateBBox,
    LengthMismatch,
    EmptyGroup,
    MissingSocialLabel,
    MissingViewLabel,
    MissingImagery,
    LowConfidenceNose,
    OutOfFrame,
    Schema,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the engine carries one of the codes above so the
/// C API can map it onto a stable status value.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, std::string(to_string(code)) + ": " + message);
}

} // namespace herdlens

#endif

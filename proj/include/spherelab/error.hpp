#pragma once

#include <stdexcept>
#include <string>

namespace spherelab {

// Every failure in the library throws Error with one of these codes.
// Codes split into two families: input/validation problems (bad shapes,
// bad config, file issues) and numerical problems (singular systems,
// degenerate geometry, divergence). The CLI maps the families to
// distinct exit codes.
enum class ErrorCode {
    // validation
    DimensionMismatch,
    NotSquare,
    EmptyInput,
    RaggedDimensions,
    LengthMismatch,
    TooShort,
    AlphaOutOfRange,
    ConfigInvalid,
    FileExists,
    IoError,
    EmptyTrace,
    IncompatibleTraces,
    // numerical
    NonFinite,
    NotSymmetric,
    NotSPD,
    NoConvergence,
    DegeneratePair,
    ZeroNormRow,
    TooFewRows,
    SingularGram,
    DivergenceDetected,
    ZeroMatrix,
    ZeroVariance,
};

const char* error_code_name(ErrorCode code);

// True for codes that indicate a numerical failure rather than bad input.
bool is_numerical(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code),
          message_(message) {}

    ErrorCode code() const { return code_; }

    // The message without the code-name prefix (for rethrow wrapping).
    const std::string& message() const { return message_; }

private:
    ErrorCode code_;
    std::string message_;
};

} // namespace spherelab

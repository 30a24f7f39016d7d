#include "spherelab/error.hpp"

namespace spherelab {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NotSquare: return "NotSquare";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::RaggedDimensions: return "RaggedDimensions";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::TooShort: return "TooShort";
        case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
        case ErrorCode::FileExists: return "FileExists";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::EmptyTrace: return "EmptyTrace";
        case ErrorCode::IncompatibleTraces: return "IncompatibleTraces";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::NotSymmetric: return "NotSymmetric";
        case ErrorCode::NotSPD: return "NotSPD";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::DegeneratePair: return "DegeneratePair";
        case ErrorCode::ZeroNormRow: return "ZeroNormRow";
        case ErrorCode::TooFewRows: return "TooFewRows";
        case ErrorCode::SingularGram: return "SingularGram";
        case ErrorCode::DivergenceDetected: return "DivergenceDetected";
        case ErrorCode::ZeroMatrix: return "ZeroMatrix";
        case ErrorCode::ZeroVariance: return "ZeroVariance";
    }
    return "UnknownError";
}

bool is_numerical(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonFinite:
        case ErrorCode::NotSymmetric:
        case ErrorCode::NotSPD:
        case ErrorCode::NoConvergence:
        case ErrorCode::DegeneratePair:
        case ErrorCode::ZeroNormRow:
        case ErrorCode::TooFewRows:
        case ErrorCode::SingularGram:
        case ErrorCode::DivergenceDetected:
        case ErrorCode::ZeroMatrix:
        case ErrorCode::ZeroVariance:
            return true;
        default:
            return false;
    }
}

} // namespace spherelab

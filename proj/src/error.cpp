#include "wqad/error.hpp"

namespace wqad {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidType: return "invalid-type";
        case ErrorCode::InvalidConfig: return "invalid-config";
        case ErrorCode::InsufficientData: return "insufficient-data";
        case ErrorCode::InsufficientTraining: return "insufficient-training";
        case ErrorCode::DegenerateSeries: return "degenerate-series";
        case ErrorCode::DegenerateColumn: return "degenerate-column";
        case ErrorCode::InvalidDof: return "invalid-dof";
        case ErrorCode::NoModel: return "no-model";
        case ErrorCode::Collinearity: return "collinearity";
        case ErrorCode::MissingCovariate: return "missing-covariate";
        case ErrorCode::Transform: return "transform";
        case ErrorCode::Extrapolation: return "extrapolation";
        case ErrorCode::SanitizeFirst: return "sanitize-first";
        case ErrorCode::Alignment: return "alignment";
        case ErrorCode::EmptyEvaluation: return "empty-evaluation";
        case ErrorCode::Plan: return "plan";
        case ErrorCode::Parse: return "parse";
        case ErrorCode::Io: return "io";
    }
    return "unknown";
}

ErrorCategory category_of(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidConfig:
        case ErrorCode::InvalidType:
        case ErrorCode::Plan:
            return ErrorCategory::Config;
        case ErrorCode::DegenerateSeries:
        case ErrorCode::DegenerateColumn:
        case ErrorCode::InvalidDof:
        case ErrorCode::NoModel:
        case ErrorCode::Collinearity:
            return ErrorCategory::Numeric;
        default:
            return ErrorCategory::Data;
    }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace wqad

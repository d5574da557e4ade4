#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wqad {

/// Broad failure category. Maps onto the CLI exit codes.
enum class ErrorCategory {
    Config = 1,
    Data = 2,
    Numeric = 3,
};

enum class ErrorCode {
    InvalidType,
    InvalidConfig,
    InsufficientData,
    InsufficientTraining,
    DegenerateSeries,
    DegenerateColumn,
    InvalidDof,
    NoModel,
    Collinearity,
    MissingCovariate,
    Transform,
    Extrapolation,
    SanitizeFirst,
    Alignment,
    EmptyEvaluation,
    Plan,
    Parse,
    Io,
};

[[nodiscard]] std::string_view to_string(ErrorCode code) noexcept;
[[nodiscard]] ErrorCategory category_of(ErrorCode code) noexcept;

/// The single exception type thrown by the library.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    [[nodiscard]] ErrorCategory category() const noexcept { return category_of(code_); }

private:
    ErrorCode code_;
};

}  // namespace wqad

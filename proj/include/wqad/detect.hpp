#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "wqad/core.hpp"
#include "wqad/forecast.hpp"
#include "wqad/rules.hpp"

namespace wqad::detect {

/// AD: observations always feed the state. ADAM: PI-flagged observations are replaced by
/// their forecast before entering the state.
enum class Mode { AD, ADAM };

[[nodiscard]] std::string_view to_string(Mode mode) noexcept;
[[nodiscard]] Mode parse_mode(std::string_view text);

struct PredictionInterval {
    double lower = 0.0;
    double upper = 0.0;
    double center = 0.0;
    double alpha = 0.01;

    [[nodiscard]] double width() const noexcept { return upper - lower; }
};

/// center +/- t_{1-alpha/2, T-k} * s. Throws Error(InvalidDof) when T - k < 1.
[[nodiscard]] PredictionInterval prediction_interval(const forecast::ForecastModel& model,
                                                     double center, double alpha);

/// Half-width of the interval above, without the center.
[[nodiscard]] double interval_half_width(const forecast::ForecastModel& model, double alpha);

/// True when observed lies strictly outside [lower, upper].
[[nodiscard]] constexpr bool classify_observation(double observed, const PredictionInterval& pi) noexcept {
    return observed < pi.lower || observed > pi.upper;
}

enum class FlagSource { None, Rule, PI };

[[nodiscard]] std::string_view to_string(FlagSource source) noexcept;

struct TraceRecord {
    Timestamp timestamp{};
    /// Observed value on the model's transformed scale.
    double observed = 0.0;
    /// Value that entered the forecasting state.
    double used_value = 0.0;
    /// Absent for warmup records.
    std::optional<double> forecast;
    std::optional<PredictionInterval> pi;
    bool flagged = false;
    FlagSource source = FlagSource::None;
    std::optional<TypeCode> rule_type;
    bool substituted = false;
};

struct DetectionTrace {
    std::string variable;
    Mode mode = Mode::AD;
    forecast::ModelKind model_kind = forecast::ModelKind::Naive;
    forecast::SeriesTransform transform = forecast::SeriesTransform::Log;
    /// Observations consumed before the first forecast (no PI).
    std::vector<TraceRecord> warmup;
    /// One record per forecast observation.
    std::vector<TraceRecord> records;
    /// Raw observations dropped by the transform itself (diff-log drops the first).
    std::vector<Timestamp> dropped;

    [[nodiscard]] std::size_t flag_count() const noexcept;
    [[nodiscard]] std::size_t substitution_count() const noexcept;
};

struct DetectionOptions {
    Mode mode = Mode::AD;
    double alpha = 0.01;
};

/// Sequential one-step-ahead detection over a sanitized raw-scale frame. The model's
/// training transform is applied here. `covariates` must have one row per frame observation
/// when the model is RegARIMA. Rule findings flag their timestamps with source Rule and never
/// trigger substitution.
[[nodiscard]] DetectionTrace run_detection(const SeriesFrame& frame,
                                           const forecast::ForecastModel& model,
                                           const DetectionOptions& options,
                                           const std::vector<rules::RuleFinding>& rule_findings = {},
                                           const forecast::CovariateMatrix* covariates = nullptr);

/// CSV: timestamp,observed,used_value,forecast,lower,upper,flagged,source,mode.
void write_trace_csv(std::ostream& out, const DetectionTrace& trace);

}  // namespace wqad::detect

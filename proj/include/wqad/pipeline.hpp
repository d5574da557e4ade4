#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "wqad/core.hpp"
#include "wqad/detect.hpp"
#include "wqad/evaluate.hpp"
#include "wqad/features.hpp"
#include "wqad/forecast.hpp"
#include "wqad/io.hpp"
#include "wqad/rules.hpp"

namespace wqad::pipeline {

enum class FeatureTransform { Log, Derivative, OneSided };

[[nodiscard]] std::string_view to_string(FeatureTransform t) noexcept;
[[nodiscard]] FeatureTransform parse_feature_transform(std::string_view text);

struct CovariateSpec {
    std::string variable;
    /// Log-transform the covariate (after sanitizing) before regression.
    bool log = false;
};

struct RunConfig {
    DetectorConfig detector;
    io::ColumnMapping mapping;
    /// Missing entries fall back to default_sensor_spec.
    std::map<std::string, SensorSpec> sensors;
    /// Variables to process; empty means every variable in the input.
    std::vector<std::string> variables;
    std::vector<forecast::ModelKind> models{forecast::ModelKind::Naive};
    std::vector<detect::Mode> modes{detect::Mode::AD};
    std::vector<features::Method> feature_methods;
    std::vector<FeatureTransform> feature_transforms{FeatureTransform::Derivative};
    /// Sign kept by the one-sided transform per variable (default positive).
    std::map<std::string, features::Direction> one_sided_direction;
    /// RegARIMA covariates per target variable.
    std::map<std::string, std::vector<CovariateSpec>> covariates;
    bool fold_class2 = true;
    bool plots = true;
    unsigned threads = 0;

    /// Throws Error(InvalidConfig) when a referenced variable is not in `available`.
    void validate(const std::set<std::string>& available) const;
};

/// Throws Error(Parse) or Error(InvalidConfig).
[[nodiscard]] RunConfig config_from_json(const std::string& text);
[[nodiscard]] std::string config_to_json(const RunConfig& config);

struct ModelRun {
    std::string variable;
    forecast::FitResult fit;
    std::vector<detect::DetectionTrace> traces;  // one per mode
};

struct FeatureRun {
    FeatureTransform transform;
    features::Method method;
    features::FeatureMatrix matrix;
    features::OutlierScoreSet scores;
};

struct PipelineResult {
    std::map<std::string, std::vector<rules::RuleFinding>> rule_findings;
    std::vector<ModelRun> model_runs;
    std::vector<FeatureRun> feature_runs;
    std::vector<evaluate::EvalReport> reports;
    /// Relative output path -> file content. Ordered, so writing is deterministic.
    std::map<std::string, std::string> artifacts;
};

/// rules -> fit and detect per model and mode -> feature detectors -> evaluation with Class 2
/// folding -> artifacts. Stage failures are rethrown with the stage and variable in the message.
[[nodiscard]] PipelineResult run_pipeline(const RunConfig& config,
                                          const std::map<std::string, SeriesFrame>& input);

/// Writes every artifact under `out_dir`.
void write_artifacts(const PipelineResult& result, const std::filesystem::path& out_dir);

/// Name used in reports and file names, e.g. "arima-ADAM".
[[nodiscard]] std::string method_name(forecast::ModelKind kind, detect::Mode mode);

}  // namespace wqad::pipeline

#pragma once

#include <filesystem>
#include <string>

#include "wqad/forecast.hpp"

namespace wqad {

/// Versioned JSON document for a fitted model.
[[nodiscard]] std::string model_to_json(const forecast::ForecastModel& model,
                                        const forecast::FitDiagnostics* diagnostics = nullptr);
/// Throws Error(Parse) on malformed documents and Error(InvalidConfig) on unsupported versions.
[[nodiscard]] forecast::ForecastModel model_from_json(const std::string& text);

void save_model(const std::filesystem::path& path, const forecast::ForecastModel& model,
                const forecast::FitDiagnostics* diagnostics = nullptr);
[[nodiscard]] forecast::ForecastModel load_model(const std::filesystem::path& path);

}  // namespace wqad

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wqad/core.hpp"
#include "wqad/forecast.hpp"

namespace wqad::prepare {

struct SanitizeResult {
    std::vector<double> values;
    /// Indices whose value was replaced.
    std::vector<std::size_t> replaced;
};

/// Replaces every value <= 0 with the nearest preceding positive value.
/// Throws Error(SanitizeFirst) when the first value is not positive.
[[nodiscard]] SanitizeResult sanitize_nonpositive(std::span<const double> values);

/// Same, applied to the observation values of a frame. Labels are kept.
[[nodiscard]] SeriesFrame sanitize_frame(const SeriesFrame& frame,
                                         std::vector<std::size_t>* replaced = nullptr);

/// Linear interpolation of `covariate` at each timestamp of `target`.
/// Throws Error(Extrapolation) when a target timestamp lies outside the covariate span.
[[nodiscard]] std::vector<double> interpolate_covariate(const SeriesFrame& target,
                                                        const SeriesFrame& covariate);

/// Applies a model transform. Log and DiffLog need strictly positive input (Error(Transform)).
/// DiffLog output is one element shorter than its input.
[[nodiscard]] std::vector<double> apply_transform(std::span<const double> values,
                                                  forecast::SeriesTransform transform);

/// Raw observations consumed by the transform before its first output value.
[[nodiscard]] std::size_t transform_offset(forecast::SeriesTransform transform) noexcept;

struct TrainingSet {
    /// Transformed training values.
    std::vector<double> values;
    /// Frame indices of the raw observations kept (before transforming).
    std::vector<std::size_t> indices;
};

/// Drops every Class 1 and Class 3 labelled observation, then transforms what remains.
/// Throws Error(InsufficientTraining) when fewer than `min_points` observations survive.
[[nodiscard]] TrainingSet build_training_set(const SeriesFrame& frame,
                                             forecast::SeriesTransform transform =
                                                 forecast::SeriesTransform::Log,
                                             std::size_t min_points = 50);

}  // namespace wqad::prepare

#include "wqad/prepare.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "wqad/error.hpp"

namespace wqad::prepare {

SanitizeResult sanitize_nonpositive(std::span<const double> values) {
    SanitizeResult out;
    out.values.assign(values.begin(), values.end());
    if (values.empty()) return out;
    if (!(values[0] > 0.0)) {
        throw Error(ErrorCode::SanitizeFirst,
                    fmt::format("first value {} is not positive; no previous value to carry", values[0]));
    }
    double last_positive = values[0];
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > 0.0) {
            last_positive = values[i];
        } else {
            out.values[i] = last_positive;
            out.replaced.push_back(i);
        }
    }
    return out;
}

SeriesFrame sanitize_frame(const SeriesFrame& frame, std::vector<std::size_t>* replaced) {
    const auto result = sanitize_nonpositive(frame.values());
    SeriesFrame out = frame;
    for (std::size_t i = 0; i < out.observations.size(); ++i) out.observations[i].value = result.values[i];
    if (replaced != nullptr) *replaced = result.replaced;
    return out;
}

std::vector<double> interpolate_covariate(const SeriesFrame& target, const SeriesFrame& covariate) {
    const auto& cov = covariate.observations;
    if (cov.empty()) {
        throw Error(ErrorCode::Extrapolation, fmt::format("covariate '{}' is empty", covariate.name));
    }
    std::vector<double> out;
    out.reserve(target.size());
    for (const auto& obs : target.observations) {
        const auto it = std::lower_bound(cov.begin(), cov.end(), obs.timestamp,
                                         [](const Observation& o, Timestamp t) { return o.timestamp < t; });
        if (it != cov.end() && it->timestamp == obs.timestamp) {
            out.push_back(it->value);
            continue;
        }
        if (it == cov.begin() || it == cov.end()) {
            throw Error(ErrorCode::Extrapolation,
                        fmt::format("{} lies outside the span of covariate '{}'",
                                    format_timestamp(obs.timestamp), covariate.name));
        }
        const auto& hi = *it;
        const auto& lo = *(it - 1);
        const double span = static_cast<double>(epoch_seconds(hi.timestamp) - epoch_seconds(lo.timestamp));
        const double frac = static_cast<double>(epoch_seconds(obs.timestamp) - epoch_seconds(lo.timestamp)) / span;
        out.push_back(lo.value + frac * (hi.value - lo.value));
    }
    return out;
}

std::vector<double> apply_transform(std::span<const double> values, forecast::SeriesTransform transform) {
    using forecast::SeriesTransform;
    if (transform == SeriesTransform::Identity) return {values.begin(), values.end()};
    std::vector<double> logs;
    logs.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0)) {
            throw Error(ErrorCode::Transform,
                        fmt::format("value {} at index {} cannot be log-transformed; sanitize first",
                                    values[i], i));
        }
        logs.push_back(std::log(values[i]));
    }
    if (transform == SeriesTransform::Log) return logs;
    std::vector<double> diffs;
    for (std::size_t i = 1; i < logs.size(); ++i) diffs.push_back(logs[i] - logs[i - 1]);
    return diffs;
}

std::size_t transform_offset(forecast::SeriesTransform transform) noexcept {
    return transform == forecast::SeriesTransform::DiffLog ? 1 : 0;
}

TrainingSet build_training_set(const SeriesFrame& frame, forecast::SeriesTransform transform,
                               std::size_t min_points) {
    TrainingSet out;
    std::vector<double> raw;
    for (std::size_t i = 0; i < frame.observations.size(); ++i) {
        const auto& obs = frame.observations[i];
        const auto label = frame.labels.find(obs.timestamp);
        if (label != frame.labels.end() && label->second.anomaly_class() != 2) continue;
        out.indices.push_back(i);
        raw.push_back(obs.value);
    }
    if (raw.size() < min_points) {
        throw Error(ErrorCode::InsufficientTraining,
                    fmt::format("'{}' has {} clean observations, need at least {}", frame.name,
                                raw.size(), min_points));
    }
    out.values = apply_transform(raw, transform);
    return out;
}

}  // namespace wqad::prepare

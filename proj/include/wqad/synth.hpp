#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "wqad/core.hpp"

namespace wqad::synth {

enum class BaseKind { RandomWalk, AR1, Seasonal };

[[nodiscard]] std::string_view to_string(BaseKind k) noexcept;
[[nodiscard]] BaseKind parse_base_kind(std::string_view text);

/// The log of the series follows
///   random-walk: u_t = u_{t-1} + drift + sigma e_t
///   ar1:         u_t = phi u_{t-1} + sigma e_t
///   seasonal:    ar1 plus amplitude * sin(2 pi t / period)
/// and the value is exp(level + u_t).
struct BaseParams {
    double level = 3.0;
    double drift = 0.0;
    double phi = 0.8;
    double sigma = 0.05;
    double season_amplitude = 0.0;
    double season_period = 24.0;
    std::int64_t start_epoch = 1'483'228'800;  // 2017-01-01T00:00:00Z
    std::int64_t interval_seconds = 3600;

    void validate(BaseKind kind) const;
};

/// Deterministic for a given seed.
[[nodiscard]] SeriesFrame generate_base(BaseKind kind, const BaseParams& params, std::size_t n,
                                        std::uint64_t seed, std::string name = "series");

/// One planted anomaly. Magnitudes are multiples of the base sigma on the log scale,
/// except F (value = -magnitude) and G (value = magnitude, raw units).
struct Injection {
    TypeCode type_code = TypeCode::A;
    std::size_t start = 0;
    std::size_t length = 1;
    double magnitude = 10.0;
};

struct InjectionPlan {
    BaseKind base_kind = BaseKind::AR1;
    BaseParams base_params;
    std::size_t n = 1000;
    std::uint64_t seed = 1;
    std::string name = "series";
    std::vector<Injection> injections;
};

/// Throws Error(Plan) for overlapping or out-of-range injections.
void validate_plan(const InjectionPlan& plan, std::size_t series_length);

/// Applies the injections and labels the affected observations. K deletes `length`
/// observations starting at `start` and labels the first survivor after them.
/// `sigma` is the log-scale unit for magnitudes.
[[nodiscard]] SeriesFrame inject(const SeriesFrame& frame, const std::vector<Injection>& injections,
                                 double sigma);

/// generate_base followed by inject.
[[nodiscard]] SeriesFrame realize(const InjectionPlan& plan);

/// Plan JSON: {"base": {"kind", params...}, "n", "seed", "name", "injections": [{"type", "start", "length", "magnitude"}]}
[[nodiscard]] InjectionPlan plan_from_json(const std::string& text);
[[nodiscard]] std::string plan_to_json(const InjectionPlan& plan);

}  // namespace wqad::synth

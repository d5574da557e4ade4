#include "wqad/detect.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "wqad/error.hpp"
#include "wqad/prepare.hpp"
#include "wqad/stats.hpp"

namespace wqad::detect {

std::string_view to_string(Mode mode) noexcept { return mode == Mode::AD ? "AD" : "ADAM"; }

Mode parse_mode(std::string_view text) {
    if (text == "AD" || text == "ad") return Mode::AD;
    if (text == "ADAM" || text == "adam") return Mode::ADAM;
    throw Error(ErrorCode::InvalidConfig, fmt::format("unknown detection mode '{}'", text));
}

std::string_view to_string(FlagSource source) noexcept {
    switch (source) {
        case FlagSource::None: return "none";
        case FlagSource::Rule: return "rule";
        case FlagSource::PI: return "pi";
    }
    return "none";
}

double interval_half_width(const forecast::ForecastModel& model, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error(ErrorCode::InvalidConfig, fmt::format("alpha {} not in (0,1)", alpha));
    }
    const long dof = static_cast<long>(model.T) - static_cast<long>(model.k_params);
    if (dof < 1) {
        throw Error(ErrorCode::InvalidDof,
                    fmt::format("T - k = {} - {} leaves no degrees of freedom", model.T, model.k_params));
    }
    return stats::student_t_quantile(1.0 - alpha / 2.0, static_cast<double>(dof)) * model.s;
}

PredictionInterval prediction_interval(const forecast::ForecastModel& model, double center, double alpha) {
    const double half = interval_half_width(model, alpha);
    return {center - half, center + half, center, alpha};
}

std::size_t DetectionTrace::flag_count() const noexcept {
    auto flagged = [](const TraceRecord& r) { return r.flagged; };
    return static_cast<std::size_t>(std::count_if(warmup.begin(), warmup.end(), flagged) +
                                    std::count_if(records.begin(), records.end(), flagged));
}

std::size_t DetectionTrace::substitution_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [](const TraceRecord& r) { return r.substituted; }));
}

DetectionTrace run_detection(const SeriesFrame& frame, const forecast::ForecastModel& model,
                             const DetectionOptions& options,
                             const std::vector<rules::RuleFinding>& rule_findings,
                             const forecast::CovariateMatrix* covariates) {
    require_valid(frame);
    const bool regression = model.kind == forecast::ModelKind::RegARIMA;
    if (regression && (covariates == nullptr || covariates->rows() != frame.size())) {
        throw Error(ErrorCode::MissingCovariate,
                    fmt::format("RegARIMA detection on '{}' needs one covariate row per observation",
                                frame.name));
    }

    const std::vector<double> series = prepare::apply_transform(frame.values(), model.training_transform);
    const std::size_t offset = prepare::transform_offset(model.training_transform);
    const double half = interval_half_width(model, options.alpha);

    std::map<Timestamp, TypeCode> rule_at;
    for (const auto& f : rule_findings) rule_at.emplace(f.timestamp, f.type_code);

    DetectionTrace trace;
    trace.variable = frame.name;
    trace.mode = options.mode;
    trace.model_kind = model.kind;
    trace.transform = model.training_transform;
    for (std::size_t i = 0; i < offset && i < frame.size(); ++i) {
        trace.dropped.push_back(frame.observations[i].timestamp);
    }

    forecast::ForecastState state(model);
    for (std::size_t j = 0; j < series.size(); ++j) {
        const std::size_t raw = j + offset;
        const auto z = regression ? covariates->row(raw) : std::span<const double>{};
        TraceRecord rec;
        rec.timestamp = frame.observations[raw].timestamp;
        rec.observed = series[j];
        rec.used_value = series[j];
        if (const auto it = rule_at.find(rec.timestamp); it != rule_at.end()) {
            rec.flagged = true;
            rec.source = FlagSource::Rule;
            rec.rule_type = it->second;
        }
        if (!state.ready()) {
            state.push(rec.used_value, z);
            trace.warmup.push_back(rec);
            continue;
        }
        const double f = state.forecast(z);
        rec.forecast = f;
        rec.pi = PredictionInterval{f - half, f + half, f, options.alpha};
        const bool outside = classify_observation(rec.observed, *rec.pi);
        if (outside && rec.source != FlagSource::Rule) {
            rec.flagged = true;
            rec.source = FlagSource::PI;
        }
        if (outside && options.mode == Mode::ADAM) {
            rec.used_value = f;
            rec.substituted = true;
        }
        state.push(rec.used_value, z);
        trace.records.push_back(rec);
    }
    return trace;
}

void write_trace_csv(std::ostream& out, const DetectionTrace& trace) {
    out << "timestamp,observed,used_value,forecast,lower,upper,flagged,source,mode\n";
    auto row = [&](const TraceRecord& r) {
        out << format_timestamp(r.timestamp) << ',' << fmt::format("{}", r.observed) << ','
            << fmt::format("{}", r.used_value) << ',';
        if (r.pi) {
            out << fmt::format("{},{},{}", *r.forecast, r.pi->lower, r.pi->upper);
        } else {
            out << ",,";
        }
        out << ',' << (r.flagged ? 1 : 0) << ',' << to_string(r.source) << ',' << to_string(trace.mode)
            << '\n';
    };
    for (const auto& r : trace.warmup) row(r);
    for (const auto& r : trace.records) row(r);
}

}  // namespace wqad::detect

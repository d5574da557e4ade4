#include "wqad/rules.hpp"

#include <cmath>
#include <map>

#include <fmt/format.h>

#include "wqad/error.hpp"

namespace wqad::rules {
namespace {

void check_variable(const SeriesFrame& frame, const SensorSpec& spec) {
    spec.validate();
    if (!frame.name.empty() && !spec.variable.empty() && frame.name != spec.variable) {
        throw Error(ErrorCode::InvalidConfig,
                    fmt::format("sensor spec '{}' applied to frame '{}'", spec.variable, frame.name));
    }
}

bool is_impossible(double value, const SensorSpec& spec) {
    return value < 0.0 || (spec.zero_is_impossible && value == 0.0);
}

int precedence(TypeCode code) {
    switch (code) {
        case TypeCode::F: return 0;
        case TypeCode::G: return 1;
        default: return 2;
    }
}

}  // namespace

std::vector<RuleFinding> detect_missing_gap(const SeriesFrame& frame, double max_gap_minutes) {
    if (!(max_gap_minutes > 0.0)) {
        throw Error(ErrorCode::InvalidConfig, "max_gap_minutes must be positive");
    }
    require_valid(frame);
    std::vector<RuleFinding> out;
    const auto& obs = frame.observations;
    for (std::size_t i = 1; i < obs.size(); ++i) {
        const double gap =
            static_cast<double>((obs[i].timestamp - obs[i - 1].timestamp).count()) / 60.0;
        if (gap > max_gap_minutes) {
            out.push_back({obs[i].timestamp, TypeCode::K,
                           fmt::format("gap of {} min exceeds {} min", gap, max_gap_minutes)});
        }
    }
    return out;
}

std::vector<RuleFinding> detect_impossible(const SeriesFrame& frame, const SensorSpec& spec) {
    check_variable(frame, spec);
    std::vector<RuleFinding> out;
    for (const auto& o : frame.observations) {
        if (o.value < 0.0) {
            out.push_back({o.timestamp, TypeCode::F, fmt::format("negative value {}", o.value)});
        } else if (spec.zero_is_impossible && o.value == 0.0) {
            out.push_back({o.timestamp, TypeCode::F, "zero value"});
        }
    }
    return out;
}

std::vector<RuleFinding> detect_out_of_range(const SeriesFrame& frame, const SensorSpec& spec) {
    check_variable(frame, spec);
    std::vector<RuleFinding> out;
    for (const auto& o : frame.observations) {
        if (is_impossible(o.value, spec)) continue;
        if (o.value < spec.min_detectable || o.value > spec.max_detectable) {
            out.push_back({o.timestamp, TypeCode::G,
                           fmt::format("value {} outside [{}, {}]", o.value, spec.min_detectable,
                                       spec.max_detectable)});
        }
    }
    return out;
}

std::vector<RuleFinding> run_rules(const SeriesFrame& frame, const SensorSpec& spec,
                                   const DetectorConfig& config) {
    config.validate();
    std::map<Timestamp, RuleFinding> merged;
    auto absorb = [&merged](std::vector<RuleFinding> findings) {
        for (auto& f : findings) {
            auto it = merged.find(f.timestamp);
            if (it == merged.end()) {
                merged.emplace(f.timestamp, std::move(f));
            } else if (precedence(f.type_code) < precedence(it->second.type_code)) {
                it->second = std::move(f);
            }
        }
    };
    absorb(detect_impossible(frame, spec));
    absorb(detect_out_of_range(frame, spec));
    absorb(detect_missing_gap(frame, config.max_gap_minutes));

    std::vector<RuleFinding> out;
    out.reserve(merged.size());
    for (auto& [ts, f] : merged) out.push_back(std::move(f));
    return out;
}

}  // namespace wqad::rules

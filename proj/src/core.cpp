#include "wqad/core.hpp"

#include <algorithm>
#include <ctime>
#include <iomanip>
#include <sstream>

#include <fmt/format.h>

#include "wqad/error.hpp"

namespace wqad {

Timestamp timestamp_from_epoch(std::int64_t seconds) noexcept {
    return Timestamp{std::chrono::seconds{seconds}};
}

std::int64_t epoch_seconds(Timestamp t) noexcept {
    return t.time_since_epoch().count();
}

std::string format_timestamp(Timestamp t) {
    const std::time_t tt = static_cast<std::time_t>(epoch_seconds(t));
    std::tm tm{};
    gmtime_r(&tt, &tm);
    return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}Z", tm.tm_year + 1900,
                       tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
}

Timestamp parse_timestamp(std::string_view text, std::string_view pattern) {
    std::string body(text);
    while (!body.empty() && (body.back() == ' ' || body.back() == '\r')) body.pop_back();
    if (!body.empty() && body.back() == 'Z') body.pop_back();

    std::tm tm{};
    std::istringstream in(body);
    in >> std::get_time(&tm, std::string(pattern).c_str());
    if (in.fail()) {
        throw Error(ErrorCode::Parse, fmt::format("cannot parse timestamp '{}' with pattern '{}'",
                                                  text, pattern));
    }
    in >> std::ws;
    if (!in.eof()) {
        throw Error(ErrorCode::Parse, fmt::format("trailing characters in timestamp '{}'", text));
    }
    return timestamp_from_epoch(static_cast<std::int64_t>(timegm(&tm)));
}

TypeCode parse_type_code(std::string_view letter) {
    if (letter.size() == 1 && letter[0] >= 'A' && letter[0] <= 'L') {
        return static_cast<TypeCode>(letter[0]);
    }
    throw Error(ErrorCode::InvalidType, fmt::format("unknown anomaly type '{}'", letter));
}

char to_char(TypeCode code) noexcept { return static_cast<char>(code); }

std::string_view to_string(Provenance p) noexcept {
    switch (p) {
        case Provenance::GroundTruth: return "ground-truth";
        case Provenance::Rule: return "rule";
        case Provenance::Regression: return "regression";
        case Provenance::Feature: return "feature";
    }
    return "unknown";
}

int classify_type_to_class(TypeCode code) {
    switch (code) {
        case TypeCode::A:
        case TypeCode::D:
        case TypeCode::I:
        case TypeCode::J:
            return 1;
        case TypeCode::F:
        case TypeCode::G:
        case TypeCode::K:
            return 2;
        case TypeCode::B:
        case TypeCode::C:
        case TypeCode::E:
        case TypeCode::H:
        case TypeCode::L:
            return 3;
    }
    throw Error(ErrorCode::InvalidType,
                fmt::format("unknown anomaly type '{}'", static_cast<int>(code)));
}

int classify_type_to_class(char letter) {
    return classify_type_to_class(parse_type_code(std::string_view(&letter, 1)));
}

std::vector<double> SeriesFrame::values() const {
    std::vector<double> out;
    out.reserve(observations.size());
    for (const auto& o : observations) out.push_back(o.value);
    return out;
}

std::vector<Timestamp> SeriesFrame::timestamps() const {
    std::vector<Timestamp> out;
    out.reserve(observations.size());
    for (const auto& o : observations) out.push_back(o.timestamp);
    return out;
}

ValidationReport validate_frame(const SeriesFrame& frame) {
    ValidationReport report;
    const auto& obs = frame.observations;
    for (std::size_t i = 1; i < obs.size(); ++i) {
        if (obs[i].timestamp == obs[i - 1].timestamp) {
            report.push_back({FindingKind::DuplicateTimestamp, i, obs[i].timestamp,
                              fmt::format("duplicate timestamp {} at index {}",
                                          format_timestamp(obs[i].timestamp), i)});
        } else if (obs[i].timestamp < obs[i - 1].timestamp) {
            report.push_back({FindingKind::NonMonotoneTimestamp, i, obs[i].timestamp,
                              fmt::format("timestamp {} at index {} precedes its predecessor",
                                          format_timestamp(obs[i].timestamp), i)});
        }
    }
    if (!frame.labels.empty()) {
        std::vector<Timestamp> sorted = frame.timestamps();
        std::sort(sorted.begin(), sorted.end());
        for (const auto& [ts, label] : frame.labels) {
            if (!std::binary_search(sorted.begin(), sorted.end(), ts)) {
                report.push_back({FindingKind::OrphanLabel, 0, ts,
                                  fmt::format("label {} at {} has no observation",
                                              to_char(label.type_code), format_timestamp(ts))});
            }
        }
    }
    return report;
}

void require_valid(const SeriesFrame& frame) {
    const auto report = validate_frame(frame);
    if (!report.empty()) {
        throw Error(ErrorCode::Alignment,
                    fmt::format("frame '{}': {}", frame.name, report.front().message));
    }
}

SeriesFrame make_frame(std::string name, std::vector<Observation> observations, LabelMap labels) {
    SeriesFrame frame{std::move(name), std::move(observations), std::move(labels)};
    require_valid(frame);
    return frame;
}

void SensorSpec::validate() const {
    if (!(min_detectable < max_detectable)) {
        throw Error(ErrorCode::InvalidConfig,
                    fmt::format("sensor '{}': min_detectable {} must be below max_detectable {}",
                                variable, min_detectable, max_detectable));
    }
}

SensorSpec default_sensor_spec(std::string_view variable) {
    if (variable == "turbidity") return {"turbidity", 0.0, 4000.0, true};
    if (variable == "conductivity") return {"conductivity", 0.0, 100000.0, true};
    if (variable == "level") return {"level", -10.0, 100.0, false};
    return {std::string(variable), -1e12, 1e12, false};
}

void DetectorConfig::validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
    if (!(alpha > 0.0 && alpha < 1.0)) fail(fmt::format("alpha {} not in (0,1)", alpha));
    if (!(evt_alpha > 0.0 && evt_alpha < 1.0)) fail(fmt::format("evt_alpha {} not in (0,1)", evt_alpha));
    if (!(max_gap_minutes > 0.0)) fail("max_gap_minutes must be positive");
    if (k_neighbours < 1) fail("k_neighbours must be positive");
    if (p_max < 0 || q_max < 0 || d_max < 0) fail("order bounds must be non-negative");
    if (!(s_floor > 0.0)) fail("s_floor must be positive");
    if (!(pacf_z > 0.0)) fail("pacf_z must be positive");
}

}  // namespace wqad

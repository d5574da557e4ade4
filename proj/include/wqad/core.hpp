#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wqad {

/// UTC instant with second precision.
using Timestamp = std::chrono::sys_seconds;

[[nodiscard]] Timestamp timestamp_from_epoch(std::int64_t seconds) noexcept;
[[nodiscard]] std::int64_t epoch_seconds(Timestamp t) noexcept;
/// ISO 8601 "YYYY-MM-DDTHH:MM:SSZ".
[[nodiscard]] std::string format_timestamp(Timestamp t);
/// Parses with a strptime-style pattern; a trailing 'Z' is accepted. Throws Error(Parse).
[[nodiscard]] Timestamp parse_timestamp(std::string_view text,
                                        std::string_view pattern = "%Y-%m-%dT%H:%M:%S");

struct Observation {
    Timestamp timestamp{};
    double value = 0.0;
    std::optional<std::string> quality;  // carried through untouched
};

/// Anomaly type codes A-L.
enum class TypeCode : char {
    A = 'A', B = 'B', C = 'C', D = 'D', E = 'E', F = 'F',
    G = 'G', H = 'H', I = 'I', J = 'J', K = 'K', L = 'L',
};

inline constexpr TypeCode kAllTypeCodes[] = {
    TypeCode::A, TypeCode::B, TypeCode::C, TypeCode::D, TypeCode::E, TypeCode::F,
    TypeCode::G, TypeCode::H, TypeCode::I, TypeCode::J, TypeCode::K, TypeCode::L,
};

enum class Provenance { GroundTruth, Rule, Regression, Feature };

/// Parses a single letter A-L. Throws Error(InvalidType) otherwise.
[[nodiscard]] TypeCode parse_type_code(std::string_view letter);
[[nodiscard]] char to_char(TypeCode code) noexcept;
[[nodiscard]] std::string_view to_string(Provenance p) noexcept;

/// 1: sudden change (A, D, I, J); 2: rule-detectable (F, G, K); 3: the rest (B, C, E, H, L).
[[nodiscard]] int classify_type_to_class(TypeCode code);
/// Same mapping from a raw letter; throws Error(InvalidType) for anything outside A-L.
[[nodiscard]] int classify_type_to_class(char letter);

struct AnomalyLabel {
    TypeCode type_code = TypeCode::L;
    Provenance provenance = Provenance::GroundTruth;

    [[nodiscard]] int anomaly_class() const { return classify_type_to_class(type_code); }
    friend bool operator==(const AnomalyLabel&, const AnomalyLabel&) = default;
};

using LabelMap = std::map<Timestamp, AnomalyLabel>;

struct SeriesFrame {
    std::string name;
    std::vector<Observation> observations;
    LabelMap labels;

    [[nodiscard]] std::vector<double> values() const;
    [[nodiscard]] std::vector<Timestamp> timestamps() const;
    [[nodiscard]] std::size_t size() const noexcept { return observations.size(); }
    [[nodiscard]] bool empty() const noexcept { return observations.empty(); }
};

enum class FindingKind { DuplicateTimestamp, NonMonotoneTimestamp, OrphanLabel };

struct ValidationFinding {
    FindingKind kind;
    std::size_t index = 0;  // observation index, or 0 for orphan labels
    Timestamp timestamp{};
    std::string message;
};

using ValidationReport = std::vector<ValidationFinding>;

/// Report-only check: duplicate or decreasing timestamps and labels at absent timestamps.
[[nodiscard]] ValidationReport validate_frame(const SeriesFrame& frame);

/// Throws Error(Data-category) describing the first finding when the frame is not valid.
void require_valid(const SeriesFrame& frame);

/// Builds a frame and rejects it when validate_frame finds anything.
[[nodiscard]] SeriesFrame make_frame(std::string name, std::vector<Observation> observations,
                                     LabelMap labels = {});

struct SensorSpec {
    std::string variable;
    double min_detectable = 0.0;
    double max_detectable = 0.0;
    bool zero_is_impossible = true;

    void validate() const;
};

/// Placeholder ranges for the three monitored variables. Override per deployment.
[[nodiscard]] SensorSpec default_sensor_spec(std::string_view variable);

struct DetectorConfig {
    double alpha = 0.01;
    double max_gap_minutes = 180.0;
    int k_neighbours = 10;
    double evt_alpha = 0.05;
    int p_max = 5;
    int q_max = 5;
    int d_max = 2;
    double s_floor = 1e-8;
    /// Multiplier on 1/sqrt(n) for the PACF significance band used in AR order selection.
    double pacf_z = 1.96;

    void validate() const;
};

}  // namespace wqad

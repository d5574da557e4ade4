#pragma once

#include <string>
#include <vector>

#include "wqad/core.hpp"

namespace wqad::rules {

/// A Class 2 anomaly raised by one of the hard-coded checks. type_code is F, G or K.
struct RuleFinding {
    Timestamp timestamp{};
    TypeCode type_code = TypeCode::K;
    std::string reason;

    friend bool operator==(const RuleFinding&, const RuleFinding&) = default;
};

/// K at every observation that follows a gap strictly longer than max_gap_minutes.
/// The first observation of a frame is never flagged.
[[nodiscard]] std::vector<RuleFinding> detect_missing_gap(const SeriesFrame& frame,
                                                          double max_gap_minutes);

/// F for negative values, and for exact zeros when the sensor says zero is impossible.
[[nodiscard]] std::vector<RuleFinding> detect_impossible(const SeriesFrame& frame,
                                                         const SensorSpec& spec);

/// G for values outside [min_detectable, max_detectable] that are not already F.
[[nodiscard]] std::vector<RuleFinding> detect_out_of_range(const SeriesFrame& frame,
                                                           const SensorSpec& spec);

/// Union of the three checks, one finding per timestamp, precedence F > G > K,
/// ordered by timestamp.
[[nodiscard]] std::vector<RuleFinding> run_rules(const SeriesFrame& frame, const SensorSpec& spec,
                                                 const DetectorConfig& config);

}  // namespace wqad::rules

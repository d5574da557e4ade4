#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "wqad/core.hpp"
#include "wqad/detect.hpp"

namespace wqad::evaluate {

struct ConfusionMatrix {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fn = 0;

    [[nodiscard]] std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// A ratio of counts, kept exact so that display rounding is exact too.
struct Ratio {
    std::uint64_t numerator = 0;
    std::uint64_t denominator = 1;

    [[nodiscard]] double value() const noexcept {
        return static_cast<double>(numerator) / static_cast<double>(denominator);
    }
    /// Half-up rounding to `digits` decimals, computed in integer arithmetic.
    [[nodiscard]] double rounded(int digits = 2) const;
};

/// Undefined metrics (zero denominator) are std::nullopt, never 0.
struct Metrics {
    Ratio accuracy;
    Ratio error_rate;
    std::optional<Ratio> npv;
    std::optional<Ratio> ppv;
};

struct TypeHits {
    std::uint64_t total = 0;
    std::uint64_t hit = 0;
    friend bool operator==(const TypeHits&, const TypeHits&) = default;
};

using PerTypeReport = std::map<TypeCode, TypeHits>;

struct EvalReport {
    std::string variable;
    std::string method;
    ConfusionMatrix matrix;
    Metrics metrics;
    std::optional<double> rmse;
    PerTypeReport per_type;
    /// Class 2 rule hits added to tp.
    std::uint64_t folded = 0;
};

/// Evaluated points: each timestamp is either flagged or not.
using FlagSet = std::map<Timestamp, bool>;

/// Per-observation comparison against ground truth (any label counts as anomalous).
/// Throws Error(Alignment) when a label refers to a timestamp absent from `flags`
/// and `strict` is set.
[[nodiscard]] ConfusionMatrix build_confusion(const FlagSet& flags, const LabelMap& labels,
                                              bool strict = true);

/// Adds rule_hits to tp. When missed > 0 those Class 2 points count as fn.
[[nodiscard]] ConfusionMatrix fold_class2(ConfusionMatrix matrix, std::uint64_t rule_hits,
                                          std::uint64_t missed = 0);

/// Throws Error(EmptyEvaluation) when the matrix is empty.
[[nodiscard]] Metrics metrics(const ConfusionMatrix& matrix);

/// sqrt(mean((observed - forecast)^2)) over the forecast records.
[[nodiscard]] double rmse(const detect::DetectionTrace& trace);

[[nodiscard]] PerTypeReport per_type_report(const FlagSet& flags, const LabelMap& labels);

/// Flags of a detection trace over its forecast records; warmup records are included when
/// `include_warmup` is set.
[[nodiscard]] FlagSet flags_from_trace(const detect::DetectionTrace& trace, bool include_warmup = true);

/// Removes the given timestamps from a flag set and a label map (Class 2 exclusion).
void exclude(FlagSet& flags, LabelMap& labels, const std::set<Timestamp>& timestamps);

/// Two-decimal text, or "n/a" when undefined.
[[nodiscard]] std::string format_metric(const std::optional<Ratio>& r);

/// Column order: variable, method, TN, FN, FP, TP, accuracy, error, NPV, PPV, RMSE.
void write_report_table(std::ostream& out, const std::vector<EvalReport>& reports);
void write_report_csv(std::ostream& out, const std::vector<EvalReport>& reports);
/// variable, method, type, total, hit
void write_per_type_csv(std::ostream& out, const std::vector<EvalReport>& reports);

}  // namespace wqad::evaluate

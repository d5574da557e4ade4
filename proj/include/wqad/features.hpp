#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wqad/core.hpp"

namespace wqad::features {

// ---------------------------------------------------------------------------
// Series transforms
// ---------------------------------------------------------------------------

/// Elementwise natural log. Throws Error(SanitizeFirst) on a nonpositive value.
[[nodiscard]] std::vector<double> transform_log(std::span<const double> series);

/// Central differences (x[t+1] - x[t-1]) / 2 inside, one-step differences at the ends.
/// Throws Error(InsufficientData) for fewer than 3 values.
[[nodiscard]] std::vector<double> transform_derivative(std::span<const double> series);

enum class Direction { Positive, Negative };

[[nodiscard]] std::string_view to_string(Direction d) noexcept;
[[nodiscard]] Direction parse_direction(std::string_view text);

/// Keeps values of the chosen sign and zeroes the rest.
[[nodiscard]] std::vector<double> transform_one_sided(std::span<const double> derivative,
                                                      Direction direction);

// ---------------------------------------------------------------------------
// Feature matrix
// ---------------------------------------------------------------------------

struct FeatureColumn {
    std::string name;
    std::vector<Timestamp> timestamps;
    std::vector<double> values;
};

/// Rows are time points, columns transformed series (row-major).
struct FeatureMatrix {
    std::vector<std::string> columns;
    std::vector<Timestamp> timestamps;
    std::vector<double> data;
    /// Timestamps dropped because a column was missing there or held a non-finite value.
    std::vector<Timestamp> dropped;

    [[nodiscard]] std::size_t cols() const noexcept { return columns.size(); }
    [[nodiscard]] std::size_t rows() const noexcept { return timestamps.size(); }
    [[nodiscard]] std::span<const double> row(std::size_t i) const { return {data.data() + i * cols(), cols()}; }
    [[nodiscard]] double at(std::size_t r, std::size_t c) const { return data[r * cols() + c]; }
};

/// Joins columns on common timestamps. Rows missing from any column, or holding a
/// non-finite value, are dropped and listed in `dropped`.
[[nodiscard]] FeatureMatrix assemble(const std::vector<FeatureColumn>& columns);

/// Min-max scales every column to [0, 1]. Throws Error(DegenerateColumn) on a constant column.
[[nodiscard]] FeatureMatrix normalize_columns(const FeatureMatrix& matrix);

// ---------------------------------------------------------------------------
// Detectors
// ---------------------------------------------------------------------------

struct ExemplarSet {
    /// Row index of each exemplar, in creation order.
    std::vector<std::size_t> exemplars;
    /// For each row, the position of its exemplar in `exemplars`.
    std::vector<std::size_t> membership;
    double radius = 0.0;
};

/// Single pass in row order; each row joins the nearest exemplar within `radius`
/// or becomes a new exemplar.
[[nodiscard]] ExemplarSet leader_cluster(const FeatureMatrix& matrix, double radius);

/// Exponential tail fitted to the upper half of the sorted positive distances, anchored at
/// their median: median + mean_excess * ln(1 / evt_alpha). +inf when all distances are equal.
/// Throws Error(InsufficientData) for fewer than 10 distances.
[[nodiscard]] double evt_threshold(std::span<const double> distances, double evt_alpha);

enum class Method { HDoutliers, KnnAgg, KnnSum };

[[nodiscard]] std::string_view to_string(Method m) noexcept;
[[nodiscard]] Method parse_method(std::string_view text);

struct OutlierScoreSet {
    Method method = Method::HDoutliers;
    /// One score per matrix row.
    std::vector<double> scores;
    double threshold = 0.0;
    /// flagged[i] == (scores[i] > threshold)
    std::vector<bool> flagged;

    [[nodiscard]] std::size_t flag_count() const noexcept;
};

struct FeatureOptions {
    std::size_t k = 10;
    double evt_alpha = 0.05;
    /// Worker threads for per-row scoring (0 = hardware).
    unsigned threads = 0;
};

/// Leader clustering with radius 0.1 / (ln n)^(1/dim), nearest-exemplar distances as scores and
/// an EVT threshold over them. Members of a flagged exemplar are flagged with it. With fewer than
/// 10 exemplars there is no tail to fit and nothing is flagged.
[[nodiscard]] OutlierScoreSet hdoutliers_detect(const FeatureMatrix& matrix, const FeatureOptions& options = {});

/// Per-row kNN scores (threshold left at +inf). agg weights neighbour i by (k - i + 1) / sum(1..k).
/// Throws Error(InsufficientData) when rows <= k.
[[nodiscard]] OutlierScoreSet knn_scores(const FeatureMatrix& matrix, std::size_t k, Method variant,
                                         unsigned threads = 0);

/// knn_scores followed by evt_threshold over the scores.
[[nodiscard]] OutlierScoreSet knn_detect(const FeatureMatrix& matrix, Method variant,
                                         const FeatureOptions& options = {});

/// Dispatches on `method`.
[[nodiscard]] OutlierScoreSet run_method(const FeatureMatrix& matrix, Method method,
                                         const FeatureOptions& options = {});

}  // namespace wqad::features

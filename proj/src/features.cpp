#include "wqad/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "wqad/error.hpp"
#include "wqad/kdtree.hpp"
#include "wqad/parallel.hpp"

namespace wqad::features {

std::vector<double> transform_log(std::span<const double> series) {
    std::vector<double> out;
    out.reserve(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (!(series[i] > 0.0)) {
            throw Error(ErrorCode::SanitizeFirst,
                        fmt::format("value {} at index {} is not positive; sanitize before log", series[i], i));
        }
        out.push_back(std::log(series[i]));
    }
    return out;
}

std::vector<double> transform_derivative(std::span<const double> series) {
    const std::size_t n = series.size();
    if (n < 3) {
        throw Error(ErrorCode::InsufficientData,
                    fmt::format("derivative needs at least 3 values, got {}", n));
    }
    std::vector<double> out(n);
    out[0] = series[1] - series[0];
    for (std::size_t t = 1; t + 1 < n; ++t) out[t] = (series[t + 1] - series[t - 1]) / 2.0;
    out[n - 1] = series[n - 1] - series[n - 2];
    return out;
}

std::string_view to_string(Direction d) noexcept { return d == Direction::Positive ? "positive" : "negative"; }

Direction parse_direction(std::string_view text) {
    if (text == "positive") return Direction::Positive;
    if (text == "negative") return Direction::Negative;
    throw Error(ErrorCode::InvalidConfig, fmt::format("unknown direction '{}'", text));
}

std::vector<double> transform_one_sided(std::span<const double> derivative, Direction direction) {
    std::vector<double> out(derivative.begin(), derivative.end());
    for (double& v : out) {
        if ((direction == Direction::Positive && v < 0.0) || (direction == Direction::Negative && v > 0.0)) {
            v = 0.0;
        }
    }
    return out;
}

FeatureMatrix assemble(const std::vector<FeatureColumn>& columns) {
    FeatureMatrix m;
    if (columns.empty()) return m;
    std::map<Timestamp, std::vector<double>> rows;
    std::map<Timestamp, std::size_t> seen;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        const auto& col = columns[c];
        if (col.timestamps.size() != col.values.size()) {
            throw Error(ErrorCode::Alignment,
                        fmt::format("column '{}' has {} timestamps and {} values", col.name,
                                    col.timestamps.size(), col.values.size()));
        }
        m.columns.push_back(col.name);
        for (std::size_t i = 0; i < col.values.size(); ++i) {
            auto& r = rows[col.timestamps[i]];
            r.resize(columns.size(), std::numeric_limits<double>::quiet_NaN());
            r[c] = col.values[i];
            ++seen[col.timestamps[i]];
        }
    }
    for (const auto& [ts, values] : rows) {
        const bool complete = seen[ts] == columns.size() &&
                              std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
        if (!complete) {
            m.dropped.push_back(ts);
            continue;
        }
        m.timestamps.push_back(ts);
        m.data.insert(m.data.end(), values.begin(), values.end());
    }
    return m;
}

FeatureMatrix normalize_columns(const FeatureMatrix& matrix) {
    FeatureMatrix out = matrix;
    const std::size_t n = matrix.rows();
    for (std::size_t c = 0; c < matrix.cols(); ++c) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t r = 0; r < n; ++r) {
            lo = std::min(lo, matrix.at(r, c));
            hi = std::max(hi, matrix.at(r, c));
        }
        if (!(hi > lo)) {
            throw Error(ErrorCode::DegenerateColumn,
                        fmt::format("column '{}' has fewer than 2 distinct values", matrix.columns[c]));
        }
        const double range = hi - lo;
        for (std::size_t r = 0; r < n; ++r) out.data[r * out.cols() + c] = (matrix.at(r, c) - lo) / range;
    }
    return out;
}

namespace {

double distance(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

std::vector<bool> flag_above(std::span<const double> scores, double threshold) {
    std::vector<bool> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] > threshold;
    return out;
}

}  // namespace

ExemplarSet leader_cluster(const FeatureMatrix& matrix, double radius) {
    if (!(radius > 0.0)) throw Error(ErrorCode::InvalidConfig, "leader radius must be positive");
    ExemplarSet set;
    set.radius = radius;
    set.membership.resize(matrix.rows());
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
        const auto point = matrix.row(r);
        std::size_t best = set.exemplars.size();
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t e = 0; e < set.exemplars.size(); ++e) {
            const double d = distance(point, matrix.row(set.exemplars[e]));
            if (d <= radius && d < best_d) {
                best = e;
                best_d = d;
            }
        }
        if (best == set.exemplars.size()) set.exemplars.push_back(r);
        set.membership[r] = best;
    }
    return set;
}

double evt_threshold(std::span<const double> distances, double evt_alpha) {
    if (distances.size() < 10) {
        throw Error(ErrorCode::InsufficientData,
                    fmt::format("EVT threshold needs at least 10 distances, got {}", distances.size()));
    }
    if (!(evt_alpha > 0.0 && evt_alpha < 1.0)) {
        throw Error(ErrorCode::InvalidConfig, fmt::format("evt_alpha {} not in (0,1)", evt_alpha));
    }
    const auto [lo, hi] = std::minmax_element(distances.begin(), distances.end());
    if (*lo == *hi) return std::numeric_limits<double>::infinity();

    std::vector<double> positive;
    for (double d : distances) {
        if (d > 0.0) positive.push_back(d);
    }
    std::sort(positive.begin(), positive.end());
    const std::size_t n = positive.size();
    if (n < 2) return std::numeric_limits<double>::infinity();
    const double median = n % 2 == 1 ? positive[n / 2] : 0.5 * (positive[n / 2 - 1] + positive[n / 2]);
    double excess = 0.0;
    for (std::size_t i = n / 2; i < n; ++i) excess += positive[i] - median;
    excess /= static_cast<double>(n - n / 2);
    if (!(excess > 0.0)) return std::numeric_limits<double>::infinity();
    return median + excess * std::log(1.0 / evt_alpha);
}

std::string_view to_string(Method m) noexcept {
    switch (m) {
        case Method::HDoutliers: return "hdoutliers";
        case Method::KnnAgg: return "knn-agg";
        case Method::KnnSum: return "knn-sum";
    }
    return "unknown";
}

Method parse_method(std::string_view text) {
    if (text == "hdoutliers") return Method::HDoutliers;
    if (text == "knn-agg") return Method::KnnAgg;
    if (text == "knn-sum") return Method::KnnSum;
    throw Error(ErrorCode::InvalidConfig, fmt::format("unknown feature method '{}'", text));
}

std::size_t OutlierScoreSet::flag_count() const noexcept {
    return static_cast<std::size_t>(std::count(flagged.begin(), flagged.end(), true));
}

OutlierScoreSet hdoutliers_detect(const FeatureMatrix& matrix, const FeatureOptions& options) {
    const std::size_t n = matrix.rows();
    if (n < 2 || matrix.cols() == 0) {
        throw Error(ErrorCode::InsufficientData, "HDoutliers needs at least 2 rows and 1 column");
    }
    const double radius = 0.1 / std::pow(std::log(static_cast<double>(n)), 1.0 / static_cast<double>(matrix.cols()));
    const ExemplarSet set = leader_cluster(matrix, radius);

    const std::size_t m = set.exemplars.size();
    std::vector<double> ex_data;
    ex_data.reserve(m * matrix.cols());
    for (std::size_t e : set.exemplars) {
        const auto r = matrix.row(e);
        ex_data.insert(ex_data.end(), r.begin(), r.end());
    }
    std::vector<double> ex_score(m, 0.0);
    if (m >= 2) {
        const KdTree tree(ex_data, matrix.cols());
        for (std::size_t e = 0; e < m; ++e) ex_score[e] = tree.nearest_to_row(e, 1).front().distance;
    }

    OutlierScoreSet out;
    out.method = Method::HDoutliers;
    out.threshold = m >= 10 ? evt_threshold(ex_score, options.evt_alpha) : std::numeric_limits<double>::infinity();
    out.scores.resize(n);
    for (std::size_t r = 0; r < n; ++r) out.scores[r] = ex_score[set.membership[r]];
    out.flagged = flag_above(out.scores, out.threshold);
    return out;
}

OutlierScoreSet knn_scores(const FeatureMatrix& matrix, std::size_t k, Method variant, unsigned threads) {
    if (variant == Method::HDoutliers) {
        throw Error(ErrorCode::InvalidConfig, "knn_scores needs a kNN variant");
    }
    const std::size_t n = matrix.rows();
    if (k == 0 || n <= k) {
        throw Error(ErrorCode::InsufficientData, fmt::format("kNN with k = {} needs more than {} rows, got {}", k, k, n));
    }
    std::vector<double> weights(k, 1.0);
    if (variant == Method::KnnAgg) {
        const double total = static_cast<double>(k * (k + 1) / 2);
        for (std::size_t i = 0; i < k; ++i) weights[i] = static_cast<double>(k - i) / total;
    }
    const KdTree tree(matrix.data, matrix.cols());
    OutlierScoreSet out;
    out.method = variant;
    out.scores.assign(n, 0.0);
    parallel_for(n, threads, [&](std::size_t r) {
        const auto nn = tree.nearest_to_row(r, k);
        double score = 0.0;
        for (std::size_t i = 0; i < nn.size(); ++i) score += weights[i] * nn[i].distance;
        out.scores[r] = score;
    });
    out.threshold = std::numeric_limits<double>::infinity();
    out.flagged.assign(n, false);
    return out;
}

OutlierScoreSet knn_detect(const FeatureMatrix& matrix, Method variant, const FeatureOptions& options) {
    OutlierScoreSet out = knn_scores(matrix, options.k, variant, options.threads);
    out.threshold = evt_threshold(out.scores, options.evt_alpha);
    out.flagged = flag_above(out.scores, out.threshold);
    return out;
}

OutlierScoreSet run_method(const FeatureMatrix& matrix, Method method, const FeatureOptions& options) {
    return method == Method::HDoutliers ? hdoutliers_detect(matrix, options) : knn_detect(matrix, method, options);
}

}  // namespace wqad::features

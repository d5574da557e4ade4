#pragma once

#include <cstdint>
#include <vector>

namespace wqad::testing {

/// One reference row: confusion counts and the printed two-decimal metrics.
/// A printed metric of -1 stands for "n/a". `swapped` marks tables whose NPV and PPV
/// columns hold TP/(TP+FP) and TN/(TN+FN) respectively.
struct ReferenceRow {
    const char* name;
    std::uint64_t tn, fn, fp, tp;
    double accuracy, error, npv, ppv;
    bool swapped;
};

inline const std::vector<ReferenceRow>& reference_rows() {
    static const std::vector<ReferenceRow> rows{
        // regression methods, both sites
        {"regression PR turbidity naive AD", 5416, 715, 133, 16, 0.86, 0.14, 0.88, 0.11, false},
        {"regression PR turbidity naive ADAM", 347, 0, 5202, 731, 0.17, 0.83, 1.00, 0.12, false},
        {"regression PR turbidity linear-ar AD", 5398, 712, 151, 19, 0.86, 0.14, 0.88, 0.04, false},
        {"regression PR turbidity linear-ar ADAM", 4491, 25, 1058, 706, 0.83, 0.17, 0.99, 0.40, false},
        {"regression PR turbidity arima AD", 5405, 711, 144, 20, 0.86, 0.14, 0.88, 0.12, false},
        {"regression PR turbidity arima ADAM", 4465, 25, 1084, 706, 0.82, 0.18, 0.99, 0.39, false},
        {"regression PR turbidity regarima AD", 5344, 695, 205, 36, 0.86, 0.14, 0.88, 0.15, false},
        {"regression PR turbidity regarima ADAM", 171, 0, 5378, 731, 0.14, 0.86, 1.00, 0.12, false},
        {"regression PR conductivity naive AD", 5759, 459, 2, 60, 0.93, 0.07, 0.93, 0.97, false},
        {"regression PR conductivity naive ADAM", 4455, 399, 1306, 120, 0.73, 0.27, 0.92, 0.08, false},
        {"regression PR conductivity linear-ar AD", 5709, 453, 52, 66, 0.92, 0.08, 0.93, 0.56, false},
        {"regression PR conductivity linear-ar ADAM", 4256, 397, 1505, 122, 0.70, 0.30, 0.91, 0.07, false},
        {"regression PR conductivity arima AD", 5756, 455, 5, 64, 0.93, 0.07, 0.93, 0.93, false},
        {"regression PR conductivity arima ADAM", 1873, 0, 3888, 519, 0.38, 0.62, 1.00, 0.12, false},
        {"regression PR conductivity regarima AD", 5675, 437, 86, 82, 0.92, 0.08, 0.93, 0.49, false},
        {"regression PR conductivity regarima ADAM", 128, 0, 5633, 519, 0.10, 0.90, 1.00, 0.08, false},
        {"regression SC turbidity naive AD", 4386, 859, 96, 61, 0.82, 0.18, 0.84, 0.39, false},
        {"regression SC turbidity naive ADAM", 491, 134, 3991, 786, 0.24, 0.76, 0.79, 0.16, false},
        {"regression SC turbidity linear-ar AD", 4347, 830, 135, 90, 0.82, 0.18, 0.84, 0.40, false},
        {"regression SC turbidity linear-ar ADAM", 2178, 753, 2340, 167, 0.43, 0.57, 0.74, 0.07, false},
        {"regression SC turbidity arima AD", 4348, 829, 134, 91, 0.82, 0.18, 0.84, 0.40, false},
        {"regression SC turbidity arima ADAM", 2187, 751, 2295, 169, 0.44, 0.56, 0.74, 0.07, false},
        {"regression SC turbidity regarima AD", 4345, 820, 137, 100, 0.82, 0.18, 0.84, 0.42, false},
        {"regression SC turbidity regarima ADAM", 775, 81, 3707, 839, 0.30, 0.70, 0.91, 0.18, false},
        // feature methods
        {"features PR turbidity hdoutliers derivative", 5548, 728, 1, 3, 0.88, 0.12, 0.75, 0.88, true},
        {"features PR turbidity hdoutliers one-sided", 5547, 727, 2, 4, 0.88, 0.12, 0.67, 0.88, true},
        {"features PR turbidity knn-agg derivative", 5542, 725, 7, 6, 0.88, 0.12, 0.46, 0.88, true},
        {"features PR turbidity knn-agg one-sided", 5546, 728, 3, 3, 0.88, 0.12, 0.50, 0.88, true},
        {"features PR turbidity knn-sum derivative", 5547, 728, 2, 3, 0.88, 0.12, 0.60, 0.88, true},
        {"features PR turbidity knn-sum one-sided", 5546, 728, 3, 3, 0.88, 0.12, 0.50, 0.88, true},
        {"features PR conductivity hdoutliers derivative", 5758, 470, 3, 49, 0.92, 0.08, 0.94, 0.92, true},
        {"features PR conductivity hdoutliers one-sided", 5758, 479, 3, 40, 0.92, 0.08, 0.93, 0.92, true},
        {"features PR conductivity knn-agg derivative", 5759, 472, 2, 47, 0.92, 0.08, 0.96, 0.92, true},
        {"features PR conductivity knn-agg one-sided", 5758, 479, 3, 40, 0.92, 0.08, 0.93, 0.92, true},
        {"features PR conductivity knn-sum derivative", 5760, 471, 1, 48, 0.92, 0.08, 0.98, 0.92, true},
        {"features PR conductivity knn-sum one-sided", 5759, 479, 2, 40, 0.92, 0.08, 0.95, 0.92, true},
        {"features SC turbidity hdoutliers derivative", 4477, 914, 5, 6, 0.83, 0.17, 0.55, 0.83, true},
        {"features SC turbidity hdoutliers one-sided", 4481, 917, 1, 3, 0.83, 0.17, 0.75, 0.83, true},
        {"features SC turbidity knn-agg derivative", 4477, 914, 5, 6, 0.83, 0.17, 0.55, 0.83, true},
        {"features SC turbidity knn-agg one-sided", 4471, 912, 11, 8, 0.83, 0.17, 0.42, 0.83, true},
        {"features SC turbidity knn-sum derivative", 4482, 920, 0, 0, 0.83, 0.17, -1.0, 0.83, true},
        {"features SC turbidity knn-sum one-sided", 4480, 917, 2, 3, 0.83, 0.17, 0.60, 0.83, true},
        // SC conductivity, regression
        {"regression SC conductivity naive AD", 5340, 0, 60, 2, 0.99, 0.01, 1.00, 0.03, false},
        {"regression SC conductivity naive ADAM", 859, 0, 4541, 2, 0.16, 0.84, 1.00, 0.00, false},
        {"regression SC conductivity linear-ar AD", 5322, 0, 78, 2, 0.99, 0.01, 1.00, 0.03, false},
        {"regression SC conductivity linear-ar ADAM", 3988, 0, 1412, 2, 0.74, 0.26, 1.00, 0.00, false},
        {"regression SC conductivity arima AD", 5361, 0, 39, 2, 0.99, 0.01, 1.00, 0.05, false},
        {"regression SC conductivity arima ADAM", 3994, 0, 1406, 2, 0.74, 0.26, 1.00, 0.00, false},
        {"regression SC conductivity regarima AD", 5284, 0, 116, 2, 0.98, 0.02, 1.00, 0.02, false},
        {"regression SC conductivity regarima ADAM", 309, 0, 5091, 2, 0.06, 0.94, 1.00, 0.00, false},
        // SC conductivity, feature methods
        {"features SC conductivity hdoutliers derivative", 5398, 1, 2, 1, 1.00, 0.00, 0.33, 1.00, true},
        {"features SC conductivity hdoutliers one-sided", 5399, 1, 1, 1, 1.00, 0.00, 0.50, 1.00, true},
        {"features SC conductivity knn-agg derivative", 5395, 1, 5, 1, 1.00, 0.00, 0.17, 1.00, true},
        {"features SC conductivity knn-agg one-sided", 5367, 1, 33, 1, 0.99, 0.01, 0.03, 1.00, true},
        {"features SC conductivity knn-sum derivative", 5396, 1, 4, 1, 1.00, 0.00, 0.20, 1.00, true},
        {"features SC conductivity knn-sum one-sided", 5367, 1, 33, 1, 0.99, 0.01, 0.03, 1.00, true},
    };
    return rows;
}

}  // namespace wqad::testing

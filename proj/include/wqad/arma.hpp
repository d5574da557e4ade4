#pragma once

#include <span>
#include <vector>

namespace wqad::arma {

/// Applies the first difference `order` times. Output length is max(0, n - order).
[[nodiscard]] std::vector<double> difference(std::span<const double> xs, int order);

/// True when every root of 1 - sum_i coeffs[i-1] z^i lies strictly outside the unit circle
/// (with `margin` of slack on the step-down partial autocorrelations). Empty coeffs pass.
[[nodiscard]] bool roots_outside_unit_circle(std::span<const double> coeffs, double margin = 0.0);

/// AR polynomial stationarity for phi (1 - phi_1 z - ...).
[[nodiscard]] bool is_stationary(std::span<const double> phi, double margin = 0.0);
/// MA polynomial invertibility for theta (1 + theta_1 z + ...).
[[nodiscard]] bool is_invertible(std::span<const double> theta, double margin = 0.0);

/// Conditional residuals of w_t = c + sum phi_i w_{t-i} + e_t + sum theta_j e_{t-j}.
/// Residuals are produced for t = p .. n-1; pre-sample innovations are zero.
[[nodiscard]] std::vector<double> css_residuals(std::span<const double> w, double constant,
                                                std::span<const double> phi,
                                                std::span<const double> theta);

/// Sum of squares of css_residuals without materialising them.
[[nodiscard]] double css_sum_of_squares(std::span<const double> w, double constant,
                                        std::span<const double> phi,
                                        std::span<const double> theta);

/// Filters `v` (already differenced) through the inverse ARMA operator theta(B)^{-1} phi(B),
/// dropping the first p values. Used for generalised differencing of regressors.
[[nodiscard]] std::vector<double> inverse_filter(std::span<const double> v,
                                                 std::span<const double> phi,
                                                 std::span<const double> theta);

}  // namespace wqad::arma

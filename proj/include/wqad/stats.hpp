#pragma once

#include <span>
#include <vector>

namespace wqad::stats {

/// Inverse CDF of Student's t with `dof` degrees of freedom.
[[nodiscard]] double student_t_quantile(double p, double dof);
[[nodiscard]] double student_t_cdf(double x, double dof);
/// Upper tail P(X > x) of a chi-square with `dof` degrees of freedom.
[[nodiscard]] double chi_squared_sf(double x, double dof);

[[nodiscard]] double mean(std::span<const double> xs);
/// Population variance (divides by n).
[[nodiscard]] double variance(std::span<const double> xs);

/// Sample autocorrelations rho_1..rho_max_lag (mean-removed, biased normalisation).
/// Throws Error(DegenerateSeries) on a zero-variance input.
[[nodiscard]] std::vector<double> autocorrelations(std::span<const double> xs, std::size_t max_lag);

/// Ordinary least squares. `design` is row-major with `cols` columns.
/// Throws Error(Collinearity) when the design is rank deficient.
[[nodiscard]] std::vector<double> least_squares(std::span<const double> design, std::size_t cols,
                                                std::span<const double> response);

}  // namespace wqad::stats

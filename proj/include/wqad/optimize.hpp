#pragma once

#include <functional>
#include <span>
#include <vector>

namespace wqad::optimize {

struct NelderMeadOptions {
    /// Stop when the spread of simplex values is below ftol * (|f_best| + ftol).
    double ftol = 1e-12;
    /// ... and every vertex lies within xtol (infinity norm) of the best vertex.
    double xtol = 1e-8;
    std::size_t max_evaluations = 40000;
    /// Fresh simplices started from the incumbent after convergence.
    int restarts = 2;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

/// Derivative-free minimisation with the dimension-adaptive coefficients of Gao & Han.
/// The objective may return +inf to mark infeasible points.
[[nodiscard]] NelderMeadResult nelder_mead(
    const std::function<double(std::span<const double>)>& objective, std::vector<double> start,
    std::span<const double> steps, const NelderMeadOptions& options = {});

}  // namespace wqad::optimize

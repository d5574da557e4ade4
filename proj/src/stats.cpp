#include "wqad/stats.hpp"

#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "wqad/error.hpp"

namespace wqad::stats {

double student_t_quantile(double p, double dof) {
    if (!(dof > 0.0)) throw Error(ErrorCode::InvalidDof, fmt::format("t dof {} must be positive", dof));
    if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidConfig, fmt::format("t quantile p={} outside (0,1)", p));
    return boost::math::quantile(boost::math::students_t_distribution<double>(dof), p);
}

double student_t_cdf(double x, double dof) {
    if (!(dof > 0.0)) throw Error(ErrorCode::InvalidDof, fmt::format("t dof {} must be positive", dof));
    return boost::math::cdf(boost::math::students_t_distribution<double>(dof), x);
}

double chi_squared_sf(double x, double dof) {
    if (!(dof > 0.0)) throw Error(ErrorCode::InvalidDof, fmt::format("chi-square dof {} must be positive", dof));
    if (x <= 0.0) return 1.0;
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(dof), x));
}

double mean(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    const double m = mean(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - m) * (x - m);
    return acc / static_cast<double>(xs.size());
}

std::vector<double> autocorrelations(std::span<const double> xs, std::size_t max_lag) {
    const std::size_t n = xs.size();
    if (n <= max_lag) {
        throw Error(ErrorCode::InsufficientData,
                    fmt::format("need more than {} points for lag {}", max_lag, max_lag));
    }
    const double m = mean(xs);
    double c0 = 0.0;
    for (double x : xs) c0 += (x - m) * (x - m);
    if (!(c0 > 0.0)) throw Error(ErrorCode::DegenerateSeries, "series has zero variance");

    std::vector<double> rho(max_lag);
    for (std::size_t k = 1; k <= max_lag; ++k) {
        double ck = 0.0;
        for (std::size_t t = k; t < n; ++t) ck += (xs[t] - m) * (xs[t - k] - m);
        rho[k - 1] = ck / c0;
    }
    return rho;
}

std::vector<double> least_squares(std::span<const double> design, std::size_t cols,
                                  std::span<const double> response) {
    if (cols == 0 || design.size() != cols * response.size()) {
        throw Error(ErrorCode::InvalidConfig, "design/response shape mismatch");
    }
    const auto rows = static_cast<Eigen::Index>(response.size());
    if (rows < static_cast<Eigen::Index>(cols)) {
        throw Error(ErrorCode::InsufficientData,
                    fmt::format("{} rows cannot identify {} coefficients", rows, cols));
    }
    using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const Eigen::Map<const RowMatrix> x(design.data(), rows, static_cast<Eigen::Index>(cols));
    const Eigen::Map<const Eigen::VectorXd> y(response.data(), rows);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (qr.rank() < static_cast<Eigen::Index>(cols)) {
        throw Error(ErrorCode::Collinearity,
                    fmt::format("design of {} columns has rank {}", cols, qr.rank()));
    }
    const Eigen::VectorXd beta = qr.solve(y);
    return {beta.data(), beta.data() + beta.size()};
}

}  // namespace wqad::stats

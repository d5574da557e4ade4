#include <cmath>

#include <fmt/format.h>

#include "wqad/arma.hpp"
#include "wqad/error.hpp"
#include "wqad/forecast.hpp"
#include "wqad/stats.hpp"

namespace wqad::forecast {

std::vector<double> pacf(std::span<const double> train, std::size_t max_lag) {
    if (max_lag == 0) return {};
    if (train.size() <= max_lag + 1) {
        throw Error(ErrorCode::InsufficientData,
                    fmt::format("PACF to lag {} needs more than {} values, got {}", max_lag,
                                max_lag + 1, train.size()));
    }
    const std::vector<double> rho = stats::autocorrelations(train, max_lag);

    // Durbin-Levinson: phi_{k,k} = (rho_k - sum_j phi_{k-1,j} rho_{k-j}) / (1 - sum_j phi_{k-1,j} rho_j)
    std::vector<double> out(max_lag);
    std::vector<double> prev;
    std::vector<double> cur;
    for (std::size_t k = 1; k <= max_lag; ++k) {
        double num = rho[k - 1];
        double den = 1.0;
        for (std::size_t j = 1; j < k; ++j) {
            num -= prev[j - 1] * rho[k - j - 1];
            den -= prev[j - 1] * rho[j - 1];
        }
        const double phi_kk = den != 0.0 ? num / den : 0.0;
        cur.assign(k, 0.0);
        for (std::size_t j = 1; j < k; ++j) cur[j - 1] = prev[j - 1] - phi_kk * prev[k - j - 1];
        cur[k - 1] = phi_kk;
        out[k - 1] = phi_kk;
        prev.swap(cur);
    }
    return out;
}

int select_ar_order(std::span<const double> train, int p_max, double significance_z) {
    if (p_max < 1) throw Error(ErrorCode::InvalidConfig, "p_max must be at least 1");
    const auto values = pacf(train, static_cast<std::size_t>(p_max));
    const double band = significance_z / std::sqrt(static_cast<double>(train.size()));
    for (int lag = p_max; lag >= 1; --lag) {
        if (std::abs(values[static_cast<std::size_t>(lag - 1)]) > band) return lag;
    }
    return 1;
}

LjungBoxResult ljung_box(std::span<const double> residuals, std::size_t h, std::size_t fitted_params) {
    const std::size_t n = residuals.size();
    if (h <= fitted_params) {
        throw Error(ErrorCode::InvalidDof,
                    fmt::format("Ljung-Box needs h ({}) above the fitted parameter count ({})", h,
                                fitted_params));
    }
    if (n <= h) {
        throw Error(ErrorCode::InsufficientData,
                    fmt::format("Ljung-Box with h = {} needs more than {} residuals", h, h));
    }
    const std::vector<double> rho = stats::autocorrelations(residuals, h);
    const double nd = static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t k = 1; k <= h; ++k) acc += rho[k - 1] * rho[k - 1] / (nd - static_cast<double>(k));
    LjungBoxResult out;
    out.statistic = nd * (nd + 2.0) * acc;
    out.lags = h;
    out.dof = h - fitted_params;
    out.p_value = stats::chi_squared_sf(out.statistic, static_cast<double>(out.dof));
    return out;
}

FitDiagnostics diagnose(const ForecastModel& model, std::span<const double> train,
                        const CovariateMatrix* covariates) {
    const std::vector<double> resid = one_step_residuals(model, train, covariates);
    if (resid.empty()) {
        throw Error(ErrorCode::InsufficientData, "no residuals after the warmup");
    }
    FitDiagnostics diag;
    for (double r : resid) diag.rss += r * r;
    const double ne = static_cast<double>(resid.size());
    diag.aic = ne * std::log(std::max(diag.rss / ne, 1e-300)) + 2.0 * model.k_params;

    const std::size_t fitted = static_cast<std::size_t>(model.p + model.q);
    const std::size_t h = std::max(fitted + 3, std::min<std::size_t>(10, resid.size() / 5));
    try {
        if (resid.size() > h + 1) {
            const auto lb = ljung_box(resid, h, fitted);
            diag.ljung_box_Q = lb.statistic;
            diag.ljung_box_pvalue = lb.p_value;
        }
        const std::size_t lags = std::min<std::size_t>(10, resid.size() / 4);
        if (lags >= 1 && resid.size() > lags + 1) diag.pacf = pacf(resid, lags);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateSeries) throw;
    }
    return diag;
}

}  // namespace wqad::forecast

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace wqad::forecast {

enum class ModelKind { Naive, LinearAR, ARIMA, RegARIMA };

/// Scale the model was trained on, and on which it forecasts.
enum class SeriesTransform {
    Identity,
    Log,      ///< natural log of the raw values
    DiffLog,  ///< first differences of the natural log
};

[[nodiscard]] std::string_view to_string(ModelKind kind) noexcept;
[[nodiscard]] std::string_view to_string(SeriesTransform t) noexcept;
[[nodiscard]] ModelKind parse_model_kind(std::string_view text);
[[nodiscard]] SeriesTransform parse_transform(std::string_view text);

/// Row-major covariate matrix, one row per time point.
struct CovariateMatrix {
    std::size_t cols = 0;
    std::vector<double> data;

    [[nodiscard]] std::size_t rows() const noexcept { return cols == 0 ? 0 : data.size() / cols; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return {data.data() + i * cols, cols};
    }
    void append_row(std::span<const double> values);
};

/// A fitted member of the regression family
///   x_t = beta' [1, Z_t] + eta_t,  (1 - B)^d eta_t ~ ARMA(p, q) with optional constant.
/// Naive is ARIMA(0,1,0) without constant; LinearAR is ARIMA(p,0,0) with constant.
struct ForecastModel {
    ModelKind kind = ModelKind::Naive;
    int p = 0;
    int d = 1;
    int q = 0;
    bool include_constant = false;
    /// c in w_t = c + sum phi_i w_{t-i} + e_t + sum theta_j e_{t-j}, w = (1-B)^d eta.
    double constant = 0.0;
    std::vector<double> phi;
    std::vector<double> theta;
    /// [beta_0, beta_1 .. beta_k]; empty unless RegARIMA.
    std::vector<double> beta;
    /// sqrt(mean squared training residuals), floored.
    double s = 0.0;
    std::size_t T = 0;
    int k_params = 1;
    SeriesTransform training_transform = SeriesTransform::Log;

    /// History values needed before the first forecast.
    [[nodiscard]] std::size_t warmup() const noexcept { return static_cast<std::size_t>(p + d); }
    [[nodiscard]] std::size_t covariate_count() const noexcept {
        return beta.empty() ? 0 : beta.size() - 1;
    }
};

struct FitDiagnostics {
    double aic = 0.0;
    double rss = 0.0;
    double ljung_box_Q = 0.0;
    double ljung_box_pvalue = 1.0;
    std::vector<double> pacf;
};

struct FitResult {
    ForecastModel model;
    FitDiagnostics diagnostics;
};

struct FitOptions {
    double s_floor = 1e-8;
    SeriesTransform transform = SeriesTransform::Log;
    /// Defaults to d == 0 when unset.
    std::optional<bool> include_constant;
    /// Candidate fits in auto_arima run on up to this many threads (0 = hardware).
    unsigned threads = 0;
};

// ---------------------------------------------------------------------------
// Individual model families
// ---------------------------------------------------------------------------

/// Random-walk forecaster. s = sqrt(mean squared first differences), floored.
[[nodiscard]] ForecastModel fit_naive(std::span<const double> train, double s_floor = 1e-8,
                                      SeriesTransform transform = SeriesTransform::Log);

[[nodiscard]] double forecast_naive(const ForecastModel& model, double last_observed);

/// Partial autocorrelations at lags 1..max_lag via Durbin-Levinson on sample autocorrelations.
[[nodiscard]] std::vector<double> pacf(std::span<const double> train, std::size_t max_lag);

/// Largest lag <= p_max whose |PACF| exceeds significance_z / sqrt(n); 1 when none do.
[[nodiscard]] int select_ar_order(std::span<const double> train, int p_max,
                                  double significance_z = 1.96);

/// Least-squares AR(p) with intercept. k_params = p + 1.
[[nodiscard]] ForecastModel fit_linear_ar(std::span<const double> train, int p,
                                          double s_floor = 1e-8,
                                          SeriesTransform transform = SeriesTransform::DiffLog);

/// Conditional-sum-of-squares ARIMA(p,d,q) fitted by Nelder-Mead from a zero start.
/// AIC = n_eff ln(RSS / n_eff) + 2 k_params with k_params = p + q + 2.
/// Throws Error(NoModel) when the optimum is not stationary/invertible after one retry.
[[nodiscard]] FitResult fit_arima(std::span<const double> train, int p, int d, int q,
                                  const FitOptions& options = {});

/// Exhaustive AIC search over p <= p_max, d <= d_max, q <= q_max.
/// Ties go to smaller p + q, then smaller d.
[[nodiscard]] FitResult auto_arima(std::span<const double> train, int p_max, int d_max, int q_max,
                                   const FitOptions& options = {});

/// Regression on covariates with ARIMA errors, estimated in three stages: OLS, auto_arima on
/// the OLS residuals, then one generalised-differencing refit of beta. All-zero covariate
/// columns get a zero coefficient.
[[nodiscard]] FitResult fit_regarima(std::span<const double> train_y, const CovariateMatrix& train_z,
                                     int p_max, int d_max, int q_max,
                                     const FitOptions& options = {});

// ---------------------------------------------------------------------------
// Forecasting
// ---------------------------------------------------------------------------

/// Sequential one-step forecasting state. Owns the history and the recursively
/// maintained innovations; the model itself is never mutated.
class ForecastState {
public:
    explicit ForecastState(ForecastModel model);

    [[nodiscard]] const ForecastModel& model() const noexcept { return model_; }
    [[nodiscard]] std::size_t size() const noexcept { return diff_levels_.front().size(); }
    [[nodiscard]] bool ready() const noexcept { return size() >= model_.warmup(); }

    /// Mean forecast of the next value. z_next is required iff the model is RegARIMA.
    [[nodiscard]] double forecast(std::span<const double> z_next = {}) const;

    /// Appends the next value (observed or substituted) with its covariate row.
    void push(double value, std::span<const double> z = {});

    /// Innovations e_t for t >= p on the differenced scale (zero before).
    [[nodiscard]] std::span<const double> innovations() const noexcept { return e_; }

private:
    [[nodiscard]] double regression_part(std::span<const double> z) const;
    [[nodiscard]] double arma_prediction() const;
    [[nodiscard]] double undifference(double w_hat) const;

    ForecastModel model_;
    /// Level 0 holds the regression errors eta, level k their k-th differences.
    std::vector<std::vector<double>> diff_levels_;
    std::vector<double> e_;
};

/// Stateless convenience wrapper: replays `history` then forecasts one step.
[[nodiscard]] double forecast_one_step(const ForecastModel& model, std::span<const double> history,
                                       const CovariateMatrix* covariate_history = nullptr,
                                       std::optional<std::span<const double>> z_next = std::nullopt);

/// One-step in-sample residuals (observed minus forecast) after the warmup.
[[nodiscard]] std::vector<double> one_step_residuals(const ForecastModel& model,
                                                     std::span<const double> series,
                                                     const CovariateMatrix* covariates = nullptr);

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

struct LjungBoxResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t lags = 0;
    std::size_t dof = 0;
};

/// Q = n(n+2) sum_{k=1..h} rho_k^2/(n-k), referred to chi-square(h - fitted_params).
[[nodiscard]] LjungBoxResult ljung_box(std::span<const double> residuals, std::size_t h,
                                       std::size_t fitted_params);

/// AIC, Ljung-Box and residual PACF for a fitted model on its training series.
[[nodiscard]] FitDiagnostics diagnose(const ForecastModel& model, std::span<const double> train,
                                      const CovariateMatrix* covariates = nullptr);

}  // namespace wqad::forecast

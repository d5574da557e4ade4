#include "wqad/forecast.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include <fmt/format.h>

#include "wqad/arma.hpp"
#include "wqad/error.hpp"
#include "wqad/optimize.hpp"
#include "wqad/stats.hpp"

namespace wqad::forecast {

std::string_view to_string(ModelKind kind) noexcept {
    switch (kind) {
        case ModelKind::Naive: return "naive";
        case ModelKind::LinearAR: return "linear_ar";
        case ModelKind::ARIMA: return "arima";
        case ModelKind::RegARIMA: return "regarima";
    }
    return "unknown";
}

std::string_view to_string(SeriesTransform t) noexcept {
    switch (t) {
        case SeriesTransform::Identity: return "identity";
        case SeriesTransform::Log: return "log";
        case SeriesTransform::DiffLog: return "diff-log";
    }
    return "unknown";
}

ModelKind parse_model_kind(std::string_view text) {
    if (text == "naive") return ModelKind::Naive;
    if (text == "linear_ar") return ModelKind::LinearAR;
    if (text == "arima") return ModelKind::ARIMA;
    if (text == "regarima") return ModelKind::RegARIMA;
    throw Error(ErrorCode::InvalidConfig, fmt::format("unknown model kind '{}'", text));
}

SeriesTransform parse_transform(std::string_view text) {
    if (text == "identity") return SeriesTransform::Identity;
    if (text == "log") return SeriesTransform::Log;
    if (text == "diff-log") return SeriesTransform::DiffLog;
    throw Error(ErrorCode::InvalidConfig, fmt::format("unknown transform '{}'", text));
}

void CovariateMatrix::append_row(std::span<const double> values) {
    if (cols == 0 && data.empty()) cols = values.size();
    if (values.size() != cols) {
        throw Error(ErrorCode::Alignment,
                    fmt::format("covariate row has {} values, expected {}", values.size(), cols));
    }
    data.insert(data.end(), values.begin(), values.end());
}

namespace {

double floored(double s, double s_floor) { return std::max(s, s_floor); }

double aic_of(double rss, std::size_t n_eff, int k_params, double s_floor) {
    const double ne = static_cast<double>(n_eff);
    const double sigma2 = std::max(rss / ne, s_floor * s_floor);
    return ne * std::log(sigma2) + 2.0 * static_cast<double>(k_params);
}

double sum_of_squares(std::span<const double> xs) {
    double acc = 0.0;
    for (double x : xs) acc += x * x;
    return acc;
}

struct ArmaEstimate {
    double mu = 0.0;
    std::vector<double> phi;
    std::vector<double> theta;
};

ArmaEstimate unpack(std::span<const double> x, bool constant, int p, int q) {
    ArmaEstimate est;
    std::size_t off = 0;
    if (constant) est.mu = x[off++];
    est.phi.assign(x.begin() + static_cast<std::ptrdiff_t>(off), x.begin() + static_cast<std::ptrdiff_t>(off + p));
    off += static_cast<std::size_t>(p);
    est.theta.assign(x.begin() + static_cast<std::ptrdiff_t>(off), x.begin() + static_cast<std::ptrdiff_t>(off + q));
    return est;
}

double constant_of(const ArmaEstimate& est) {
    const double phi_sum = std::accumulate(est.phi.begin(), est.phi.end(), 0.0);
    return est.mu * (1.0 - phi_sum);
}

constexpr double kRootMargin = 1e-6;

// Minimises the conditional sum of squares over (mu, phi, theta). Returns nullopt when the
// optimum fails the stationarity/invertibility check from both starting points.
const optimize::NelderMeadOptions kArmaSearch{1e-10, 1e-6, 20000, 1};

std::optional<ArmaEstimate> estimate_arma(std::span<const double> w, int p, int q, bool constant) {
    const std::size_t n_eff = w.size() - static_cast<std::size_t>(p);
    const double w_mean = stats::mean(w);
    const double w_sd = std::sqrt(stats::variance(w));

    auto objective = [&](std::span<const double> x) {
        const ArmaEstimate est = unpack(x, constant, p, q);
        if (!arma::is_stationary(est.phi) || !arma::is_invertible(est.theta)) {
            return std::numeric_limits<double>::infinity();
        }
        return arma::css_sum_of_squares(w, constant_of(est), est.phi, est.theta) /
               static_cast<double>(n_eff);
    };

    const std::size_t dim = static_cast<std::size_t>(p + q) + (constant ? 1 : 0);
    std::vector<double> steps(dim, 0.1);
    if (constant) steps[0] = std::max(0.1 * w_sd, 1e-6 * std::max(1.0, std::abs(w_mean)));

    for (int attempt = 0; attempt < 2; ++attempt) {
        std::vector<double> start(dim, 0.0);
        if (constant) start[0] = w_mean;
        if (attempt == 1) {
            // Perturbed restart: small alternating coefficients.
            const std::size_t off = constant ? 1 : 0;
            for (std::size_t i = off; i < dim; ++i) start[i] = (i % 2 == 0 ? 0.05 : -0.05);
            if (!std::isfinite(objective(start))) std::fill(start.begin() + off, start.end(), 0.0);
        }
        const auto result = optimize::nelder_mead(objective, start, steps, kArmaSearch);
        ArmaEstimate est = unpack(result.x, constant, p, q);
        if (std::isfinite(result.value) && arma::is_stationary(est.phi, kRootMargin) &&
            arma::is_invertible(est.theta, kRootMargin)) {
            return est;
        }
    }
    return std::nullopt;
}

void check_orders(int p, int d, int q) {
    if (p < 0 || d < 0 || q < 0) {
        throw Error(ErrorCode::InvalidConfig, fmt::format("invalid order ({},{},{})", p, d, q));
    }
}

FitDiagnostics residual_diagnostics(std::span<const double> residuals, int p, int q) {
    FitDiagnostics diag;
    const std::size_t n = residuals.size();
    const std::size_t fitted = static_cast<std::size_t>(p + q);
    const std::size_t h = std::max(fitted + 3, std::min<std::size_t>(10, n / 5));
    try {
        if (n > h + 1) {
            const auto lb = ljung_box(residuals, h, fitted);
            diag.ljung_box_Q = lb.statistic;
            diag.ljung_box_pvalue = lb.p_value;
        }
        const std::size_t lags = std::min<std::size_t>(10, n / 4);
        if (lags >= 1 && n > lags + 1) diag.pacf = pacf(residuals, lags);
    } catch (const Error&) {
        // Degenerate (zero-variance) residuals: leave the neutral defaults.
        diag.ljung_box_Q = 0.0;
        diag.ljung_box_pvalue = 1.0;
        diag.pacf.clear();
    }
    return diag;
}

bool better(const ForecastModel& a, double aic_a, const ForecastModel& b, double aic_b) {
    const double tol = 1e-9 * std::max(1.0, std::abs(aic_b));
    if (aic_a < aic_b - tol) return true;
    if (aic_a > aic_b + tol) return false;
    if (a.p + a.q != b.p + b.q) return a.p + a.q < b.p + b.q;
    return a.d < b.d;
}

}  // namespace

ForecastModel fit_naive(std::span<const double> train, double s_floor, SeriesTransform transform) {
    if (train.size() < 2) {
        throw Error(ErrorCode::InsufficientData, "naive model needs at least 2 training values");
    }
    double rss = 0.0;
    for (std::size_t i = 1; i < train.size(); ++i) {
        const double diff = train[i] - train[i - 1];
        rss += diff * diff;
    }
    ForecastModel m;
    m.kind = ModelKind::Naive;
    m.p = 0;
    m.d = 1;
    m.q = 0;
    m.include_constant = false;
    m.constant = 0.0;
    m.s = floored(std::sqrt(rss / static_cast<double>(train.size() - 1)), s_floor);
    m.T = train.size();
    m.k_params = 1;
    m.training_transform = transform;
    return m;
}

double forecast_naive(const ForecastModel& model, double last_observed) {
    if (model.kind != ModelKind::Naive) {
        throw Error(ErrorCode::InvalidConfig, "forecast_naive called on a non-naive model");
    }
    return last_observed;
}

ForecastModel fit_linear_ar(std::span<const double> train, int p, double s_floor,
                            SeriesTransform transform) {
    if (p < 0) throw Error(ErrorCode::InvalidConfig, "AR order must be non-negative");
    const std::size_t n = train.size();
    const auto up = static_cast<std::size_t>(p);
    if (n <= up + 1) {
        throw Error(ErrorCode::InsufficientData,
                    fmt::format("AR({}) needs more than {} values, got {}", p, p + 1, n));
    }
    if (!(stats::variance(train) > 0.0)) {
        throw Error(ErrorCode::DegenerateSeries, "constant training series");
    }

    const std::size_t rows = n - up;
    const std::size_t cols = up + 1;
    std::vector<double> design(rows * cols);
    std::vector<double> response(rows);
    for (std::size_t t = up; t < n; ++t) {
        const std::size_t r = t - up;
        design[r * cols] = 1.0;
        for (std::size_t i = 1; i <= up; ++i) design[r * cols + i] = train[t - i];
        response[r] = train[t];
    }
    std::vector<double> coef;
    try {
        coef = stats::least_squares(design, cols, response);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Collinearity) {
            throw Error(ErrorCode::DegenerateSeries, fmt::format("AR({}) design is singular", p));
        }
        throw;
    }

    ForecastModel m;
    m.kind = ModelKind::LinearAR;
    m.p = p;
    m.d = 0;
    m.q = 0;
    m.include_constant = true;
    m.constant = coef[0];
    m.phi.assign(coef.begin() + 1, coef.end());
    const auto resid = arma::css_residuals(train, m.constant, m.phi, {});
    m.s = floored(std::sqrt(sum_of_squares(resid) / static_cast<double>(resid.size())), s_floor);
    m.T = n;
    m.k_params = p + 1;
    m.training_transform = transform;
    return m;
}

FitResult fit_arima(std::span<const double> train, int p, int d, int q, const FitOptions& options) {
    check_orders(p, d, q);
    const std::size_t n = train.size();
    if (n <= static_cast<std::size_t>(p + d + q + 10)) {
        throw Error(ErrorCode::InsufficientData,
                    fmt::format("ARIMA({},{},{}) needs more than {} values, got {}", p, d, q,
                                p + d + q + 10, n));
    }
    const bool constant = options.include_constant.value_or(d == 0);
    const std::vector<double> w = arma::difference(train, d);

    const auto est = estimate_arma(w, p, q, constant);
    if (!est) {
        throw Error(ErrorCode::NoModel,
                    fmt::format("ARIMA({},{},{}) optimum is not stationary/invertible", p, d, q));
    }

    ForecastModel m;
    m.kind = ModelKind::ARIMA;
    m.p = p;
    m.d = d;
    m.q = q;
    m.include_constant = constant;
    m.constant = constant ? constant_of(*est) : 0.0;
    m.phi = est->phi;
    m.theta = est->theta;
    m.T = n;
    m.k_params = p + q + 2;
    m.training_transform = options.transform;

    const auto resid = arma::css_residuals(w, m.constant, m.phi, m.theta);
    const double rss = sum_of_squares(resid);
    m.s = floored(std::sqrt(rss / static_cast<double>(resid.size())), options.s_floor);

    FitResult out{m, residual_diagnostics(resid, p, q)};
    out.diagnostics.rss = rss;
    out.diagnostics.aic = aic_of(rss, resid.size(), m.k_params, options.s_floor);
    return out;
}

FitResult auto_arima(std::span<const double> train, int p_max, int d_max, int q_max,
                     const FitOptions& options) {
    check_orders(p_max, d_max, q_max);
    struct Candidate {
        int p, d, q;
        std::optional<FitResult> fit;
    };
    std::vector<Candidate> candidates;
    for (int d = 0; d <= d_max; ++d) {
        for (int p = 0; p <= p_max; ++p) {
            for (int q = 0; q <= q_max; ++q) {
                if (train.size() > static_cast<std::size_t>(p + d + q + 10)) {
                    candidates.push_back({p, d, q, std::nullopt});
                }
            }
        }
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < candidates.size(); i = next++) {
            auto& c = candidates[i];
            try {
                c.fit = fit_arima(train, c.p, c.d, c.q, options);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::NoModel) throw;
            }
        }
    };
    unsigned threads = options.threads != 0 ? options.threads : std::thread::hardware_concurrency();
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(candidates.size())));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t]() {
                try {
                    worker();
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (const auto& err : errors) {
            if (err) std::rethrow_exception(err);
        }
    }

    const FitResult* best = nullptr;
    for (const auto& c : candidates) {
        if (!c.fit || !std::isfinite(c.fit->diagnostics.aic)) continue;
        if (best == nullptr || better(c.fit->model, c.fit->diagnostics.aic, best->model,
                                      best->diagnostics.aic)) {
            best = &*c.fit;
        }
    }
    if (best == nullptr) {
        throw Error(ErrorCode::NoModel, "every ARIMA candidate was rejected");
    }
    return *best;
}

FitResult fit_regarima(std::span<const double> train_y, const CovariateMatrix& train_z, int p_max,
                       int d_max, int q_max, const FitOptions& options) {
    const std::size_t n = train_y.size();
    const std::size_t k = train_z.cols;
    if (k == 0) throw Error(ErrorCode::MissingCovariate, "RegARIMA needs at least one covariate");
    if (train_z.rows() != n) {
        throw Error(ErrorCode::Alignment, fmt::format("{} covariate rows for {} observations",
                                                      train_z.rows(), n));
    }
    for (double v : train_z.data) {
        if (!std::isfinite(v)) throw Error(ErrorCode::MissingCovariate, "non-finite covariate value");
    }

    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < k; ++j) {
        bool nonzero = false;
        for (std::size_t i = 0; i < n && !nonzero; ++i) nonzero = train_z.row(i)[j] != 0.0;
        if (nonzero) active.push_back(j);
    }

    // Stage 1: OLS on [1, Z_active].
    const std::size_t cols = active.size() + 1;
    std::vector<double> design(n * cols);
    for (std::size_t i = 0; i < n; ++i) {
        design[i * cols] = 1.0;
        for (std::size_t a = 0; a < active.size(); ++a) design[i * cols + a + 1] = train_z.row(i)[active[a]];
    }
    std::vector<double> coef = stats::least_squares(design, cols, train_y);

    auto errors_for = [&](std::span<const double> c) {
        std::vector<double> eta(n);
        for (std::size_t i = 0; i < n; ++i) {
            double fit = 0.0;
            for (std::size_t j = 0; j < cols; ++j) fit += c[j] * design[i * cols + j];
            eta[i] = train_y[i] - fit;
        }
        return eta;
    };

    // Stage 2: ARIMA errors. The intercept lives in beta, so the ARMA part has no constant.
    FitOptions arma_opts = options;
    arma_opts.include_constant = false;
    const std::vector<double> eta1 = errors_for(coef);
    FitResult stage2 = auto_arima(eta1, p_max, d_max, q_max, arma_opts);
    const int p = stage2.model.p;
    const int d = stage2.model.d;
    const int q = stage2.model.q;

    // Stage 3: generalised differencing with the stage-2 filter, then one OLS refit.
    {
        auto filtered = [&](auto&& column_value) {
            std::vector<double> col(n);
            for (std::size_t i = 0; i < n; ++i) col[i] = column_value(i);
            return arma::inverse_filter(arma::difference(col, d), stage2.model.phi, stage2.model.theta);
        };
        const std::vector<double> fy = filtered([&](std::size_t i) { return train_y[i]; });
        const std::size_t first = d == 0 ? 0 : 1;  // a differenced intercept is identically zero
        const std::size_t fcols = cols - first;
        if (fcols > 0 && !fy.empty()) {
            std::vector<double> fdesign(fy.size() * fcols);
            for (std::size_t j = first; j < cols; ++j) {
                const auto fc = filtered([&](std::size_t i) { return design[i * cols + j]; });
                for (std::size_t r = 0; r < fc.size(); ++r) fdesign[r * fcols + (j - first)] = fc[r];
            }
            const auto refit = stats::least_squares(fdesign, fcols, fy);
            for (std::size_t j = first; j < cols; ++j) coef[j] = refit[j - first];
            if (first == 1) {
                // Re-centre the unidentified intercept so the errors stay mean-zero.
                coef[0] = 0.0;
                const auto eta0 = errors_for(coef);
                coef[0] = stats::mean(eta0);
            }
        }
    }

    const std::vector<double> eta2 = errors_for(coef);
    FitResult final_fit;
    try {
        final_fit = fit_arima(eta2, p, d, q, arma_opts);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoModel) throw;
        final_fit = fit_arima(eta1, p, d, q, arma_opts);
        coef = stats::least_squares(design, cols, train_y);
    }

    ForecastModel m = final_fit.model;
    m.kind = ModelKind::RegARIMA;
    m.beta.assign(k + 1, 0.0);
    m.beta[0] = coef[0];
    for (std::size_t a = 0; a < active.size(); ++a) m.beta[active[a] + 1] = coef[a + 1];
    m.T = n;
    m.k_params = p + q + 2 + static_cast<int>(active.size());
    m.training_transform = options.transform;

    FitResult out{m, final_fit.diagnostics};
    const std::size_t n_eff = arma::difference(eta2, d).size() - static_cast<std::size_t>(p);
    out.diagnostics.aic = aic_of(out.diagnostics.rss, n_eff, m.k_params, options.s_floor);
    return out;
}

// ---------------------------------------------------------------------------
// ForecastState
// ---------------------------------------------------------------------------

ForecastState::ForecastState(ForecastModel model)
    : model_(std::move(model)), diff_levels_(static_cast<std::size_t>(model_.d) + 1) {
    if (static_cast<int>(model_.phi.size()) != model_.p ||
        static_cast<int>(model_.theta.size()) != model_.q) {
        throw Error(ErrorCode::InvalidConfig, "model coefficient lengths do not match its orders");
    }
}

double ForecastState::regression_part(std::span<const double> z) const {
    if (model_.beta.empty()) return 0.0;
    if (z.size() != model_.covariate_count()) {
        throw Error(ErrorCode::MissingCovariate,
                    fmt::format("RegARIMA needs {} covariates, got {}", model_.covariate_count(),
                                z.size()));
    }
    double acc = model_.beta[0];
    for (std::size_t j = 0; j < z.size(); ++j) acc += model_.beta[j + 1] * z[j];
    return acc;
}

double ForecastState::arma_prediction() const {
    const auto& w = diff_levels_.back();
    const std::size_t m = w.size();
    double pred = model_.constant;
    for (std::size_t i = 1; i <= static_cast<std::size_t>(model_.p); ++i) pred += model_.phi[i - 1] * w[m - i];
    for (std::size_t j = 1; j <= static_cast<std::size_t>(model_.q) && j <= m; ++j) {
        pred += model_.theta[j - 1] * e_[m - j];
    }
    return pred;
}

double ForecastState::undifference(double w_hat) const {
    double v = w_hat;
    for (std::size_t k = diff_levels_.size() - 1; k-- > 0;) v = diff_levels_[k].back() + v;
    return v;
}

double ForecastState::forecast(std::span<const double> z_next) const {
    if (!ready()) {
        throw Error(ErrorCode::InsufficientData,
                    fmt::format("forecast needs {} history values, have {}", model_.warmup(),
                                size()));
    }
    return regression_part(z_next) + undifference(arma_prediction());
}

void ForecastState::push(double value, std::span<const double> z) {
    auto& levels = diff_levels_;
    const std::size_t d = levels.size() - 1;
    std::vector<double> fresh(levels.size());
    fresh[0] = value - regression_part(z);
    std::size_t reach = 0;
    for (std::size_t k = 1; k <= d && !levels[k - 1].empty(); ++k) {
        fresh[k] = fresh[k - 1] - levels[k - 1].back();
        reach = k;
    }
    const bool new_w = reach == d;
    double e = 0.0;
    if (new_w && levels[d].size() >= static_cast<std::size_t>(model_.p)) {
        e = fresh[d] - arma_prediction();
    }
    for (std::size_t k = 0; k <= reach; ++k) levels[k].push_back(fresh[k]);
    if (new_w) e_.push_back(e);
}

double forecast_one_step(const ForecastModel& model, std::span<const double> history,
                         const CovariateMatrix* covariate_history,
                         std::optional<std::span<const double>> z_next) {
    const bool regression = model.kind == ModelKind::RegARIMA;
    if (regression && !z_next) {
        throw Error(ErrorCode::MissingCovariate, "RegARIMA forecast needs the next covariate row");
    }
    if (regression && (covariate_history == nullptr || covariate_history->rows() != history.size())) {
        throw Error(ErrorCode::MissingCovariate, "RegARIMA forecast needs aligned covariate history");
    }
    ForecastState state(model);
    for (std::size_t i = 0; i < history.size(); ++i) {
        state.push(history[i], regression ? covariate_history->row(i) : std::span<const double>{});
    }
    return state.forecast(regression ? *z_next : std::span<const double>{});
}

std::vector<double> one_step_residuals(const ForecastModel& model, std::span<const double> series,
                                       const CovariateMatrix* covariates) {
    const bool regression = model.kind == ModelKind::RegARIMA;
    if (regression && (covariates == nullptr || covariates->rows() != series.size())) {
        throw Error(ErrorCode::MissingCovariate, "RegARIMA residuals need aligned covariates");
    }
    ForecastState state(model);
    std::vector<double> out;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto z = regression ? covariates->row(i) : std::span<const double>{};
        if (state.ready()) out.push_back(series[i] - state.forecast(z));
        state.push(series[i], z);
    }
    return out;
}

}  // namespace wqad::forecast

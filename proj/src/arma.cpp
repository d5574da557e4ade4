#include "wqad/arma.hpp"

#include <cmath>

namespace wqad::arma {

std::vector<double> difference(std::span<const double> xs, int order) {
    std::vector<double> out(xs.begin(), xs.end());
    for (int k = 0; k < order; ++k) {
        if (out.size() <= 1) return {};
        for (std::size_t i = 0; i + 1 < out.size(); ++i) out[i] = out[i + 1] - out[i];
        out.pop_back();
    }
    return out;
}

bool roots_outside_unit_circle(std::span<const double> coeffs, double margin) {
    // Step-down (Schur-Cohn) recursion: the polynomial is stable iff every
    // reflection coefficient has modulus below one.
    std::vector<double> a(coeffs.begin(), coeffs.end());
    while (!a.empty() && a.back() == 0.0) a.pop_back();
    for (std::size_t k = a.size(); k >= 1; --k) {
        const double r = a[k - 1];
        if (!std::isfinite(r) || std::abs(r) >= 1.0 - margin) return false;
        const double denom = 1.0 - r * r;
        std::vector<double> next(k - 1);
        for (std::size_t j = 1; j < k; ++j) next[j - 1] = (a[j - 1] + r * a[k - j - 1]) / denom;
        a = std::move(next);
    }
    return true;
}

bool is_stationary(std::span<const double> phi, double margin) {
    return roots_outside_unit_circle(phi, margin);
}

bool is_invertible(std::span<const double> theta, double margin) {
    std::vector<double> neg(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) neg[i] = -theta[i];
    return roots_outside_unit_circle(neg, margin);
}

std::vector<double> css_residuals(std::span<const double> w, double constant,
                                  std::span<const double> phi, std::span<const double> theta) {
    const std::size_t n = w.size();
    const std::size_t p = phi.size();
    const std::size_t q = theta.size();
    if (n <= p) return {};
    std::vector<double> e(n, 0.0);
    for (std::size_t t = p; t < n; ++t) {
        double pred = constant;
        for (std::size_t i = 1; i <= p; ++i) pred += phi[i - 1] * w[t - i];
        for (std::size_t j = 1; j <= q && j <= t; ++j) pred += theta[j - 1] * e[t - j];
        e[t] = w[t] - pred;
    }
    return {e.begin() + static_cast<std::ptrdiff_t>(p), e.end()};
}

double css_sum_of_squares(std::span<const double> w, double constant, std::span<const double> phi,
                          std::span<const double> theta) {
    const std::size_t n = w.size();
    const std::size_t p = phi.size();
    const std::size_t q = theta.size();
    if (n <= p) return 0.0;
    std::vector<double> e(n, 0.0);
    double rss = 0.0;
    for (std::size_t t = p; t < n; ++t) {
        double pred = constant;
        for (std::size_t i = 1; i <= p; ++i) pred += phi[i - 1] * w[t - i];
        for (std::size_t j = 1; j <= q && j <= t; ++j) pred += theta[j - 1] * e[t - j];
        e[t] = w[t] - pred;
        rss += e[t] * e[t];
    }
    return rss;
}

std::vector<double> inverse_filter(std::span<const double> v, std::span<const double> phi,
                                   std::span<const double> theta) {
    // Identical recursion to the residual filter with a zero constant.
    return css_residuals(v, 0.0, phi, theta);
}

}  // namespace wqad::arma

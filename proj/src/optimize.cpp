#include "wqad/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wqad/error.hpp"

namespace wqad::optimize {
namespace {

struct Simplex {
    std::vector<std::vector<double>> x;
    std::vector<double> f;
};

struct Run {
    std::vector<double> best;
    double value;
    bool converged;
};

Run run_once(const std::function<double(std::span<const double>)>& objective,
             const std::vector<double>& start, std::span<const double> steps,
             const NelderMeadOptions& opt, std::size_t& evals) {
    const std::size_t n = start.size();
    const double dn = static_cast<double>(n);
    const double reflect = 1.0;
    const double expand = 1.0 + 2.0 / dn;
    const double contract = 0.75 - 1.0 / (2.0 * dn);
    const double shrink = 1.0 - 1.0 / dn;

    auto eval = [&](const std::vector<double>& p) {
        ++evals;
        const double v = objective(p);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    };

    Simplex s;
    s.x.push_back(start);
    s.f.push_back(eval(start));
    for (std::size_t i = 0; i < n; ++i) {
        auto p = start;
        p[i] += steps[i];
        double fp = eval(p);
        if (!std::isfinite(fp)) {
            p[i] = start[i] - steps[i];
            fp = eval(p);
        }
        s.x.push_back(std::move(p));
        s.f.push_back(fp);
    }

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);
    bool converged = false;

    while (evals < opt.max_evaluations) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return s.f[a] < s.f[b]; });
        const std::size_t lo = order.front();
        const std::size_t hi = order.back();
        const std::size_t second = order[n - 1];

        const double fspread = s.f[hi] - s.f[lo];
        double xspread = 0.0;
        for (std::size_t v = 0; v <= n; ++v) {
            for (std::size_t i = 0; i < n; ++i) {
                xspread = std::max(xspread, std::abs(s.x[v][i] - s.x[lo][i]));
            }
        }
        if (std::isfinite(s.f[hi]) && fspread <= opt.ftol * (std::abs(s.f[lo]) + opt.ftol) &&
            xspread <= opt.xtol) {
            converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t v = 0; v <= n; ++v) {
            if (v == hi) continue;
            for (std::size_t i = 0; i < n; ++i) centroid[i] += s.x[v][i];
        }
        for (double& c : centroid) c /= dn;

        for (std::size_t i = 0; i < n; ++i) trial[i] = centroid[i] + reflect * (centroid[i] - s.x[hi][i]);
        const double fr = eval(trial);

        if (fr < s.f[lo]) {
            for (std::size_t i = 0; i < n; ++i) trial2[i] = centroid[i] + expand * (trial[i] - centroid[i]);
            const double fe = eval(trial2);
            if (fe < fr) {
                s.x[hi] = trial2;
                s.f[hi] = fe;
            } else {
                s.x[hi] = trial;
                s.f[hi] = fr;
            }
            continue;
        }
        if (fr < s.f[second]) {
            s.x[hi] = trial;
            s.f[hi] = fr;
            continue;
        }
        // Contraction, outside when the reflected point beats the worst vertex.
        const bool outside = fr < s.f[hi];
        const auto& base = outside ? trial : s.x[hi];
        for (std::size_t i = 0; i < n; ++i) trial2[i] = centroid[i] + contract * (base[i] - centroid[i]);
        const double fc = eval(trial2);
        if (fc < std::min(fr, s.f[hi])) {
            s.x[hi] = trial2;
            s.f[hi] = fc;
            continue;
        }
        for (std::size_t v = 0; v <= n; ++v) {
            if (v == lo) continue;
            for (std::size_t i = 0; i < n; ++i) s.x[v][i] = s.x[lo][i] + shrink * (s.x[v][i] - s.x[lo][i]);
            s.f[v] = eval(s.x[v]);
        }
    }

    const auto best = static_cast<std::size_t>(
        std::min_element(s.f.begin(), s.f.end()) - s.f.begin());
    return {s.x[best], s.f[best], converged};
}

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::vector<double> start, std::span<const double> steps,
                             const NelderMeadOptions& options) {
    if (steps.size() != start.size()) {
        throw Error(ErrorCode::InvalidConfig, "nelder_mead: step/start size mismatch");
    }
    NelderMeadResult result;
    if (start.empty()) {
        result.value = objective(start);
        result.evaluations = 1;
        result.converged = true;
        return result;
    }

    std::size_t evals = 0;
    Run run = run_once(objective, start, steps, options, evals);
    std::vector<double> restart_steps(steps.begin(), steps.end());
    for (int r = 0; r < options.restarts && evals < options.max_evaluations; ++r) {
        for (double& st : restart_steps) st *= 0.1;
        Run again = run_once(objective, run.best, restart_steps, options, evals);
        const bool improved = again.value < run.value - options.ftol * (std::abs(run.value) + options.ftol);
        if (again.value <= run.value) run = std::move(again);
        if (!improved) break;
    }
    result.x = std::move(run.best);
    result.value = run.value;
    result.evaluations = evals;
    result.converged = run.converged;
    return result;
}

}  // namespace wqad::optimize

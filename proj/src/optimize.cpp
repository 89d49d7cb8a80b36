#include "cosvar/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cosvar/special.hpp"

namespace cosvar {

double optimal_weight(double eta) noexcept {
    const double e2 = eta * eta;
    return (1.0 + e2) / (1.0 + 2.0 * e2);
}

OptimalSpectrum optimal_spectrum(const DimensionlessMeans& etas, double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("optimal_spectrum: scale must be positive");
    if (etas.size() == 0) throw std::invalid_argument("optimal_spectrum: no dimensions");
    OptimalSpectrum out;
    out.etas = etas.etas;
    out.scale = scale;
    out.weights.resize(etas.size());
    out.eigenvalues.resize(etas.size());
    for (std::size_t i = 0; i < etas.size(); ++i) {
        out.weights[i] = optimal_weight(etas.etas[i]);
        out.eigenvalues[i] = scale * out.weights[i];
    }
    return out;
}

double min_variance(const DimensionlessMeans& etas) {
    if (etas.size() == 0) throw std::invalid_argument("min_variance: no dimensions");
    CompensatedSum num, den;
    for (double eta : etas.etas) {
        const double e2 = eta * eta;
        const double w = optimal_weight(eta);
        num += w * w * (1.0 + 2.0 * e2);
        den += w * (1.0 + e2);
    }
    const double d = den.value();
    return num.value() / (d * d);
}

double case3_variance_fixed_eta(const DimensionlessMeans& etas, std::span<const double> eigenvalues) {
    if (etas.size() != eigenvalues.size()) throw std::invalid_argument("case3_variance_fixed_eta: length mismatch");
    CompensatedSum num, den;
    for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
        const double e2 = etas.etas[i] * etas.etas[i];
        const double v = eigenvalues[i];
        num += v * v * (1.0 + 2.0 * e2);
        den += v * (1.0 + e2);
    }
    const double d = den.value();
    return num.value() / (d * d);
}

std::vector<double> case3_variance_gradient(const GaussianModel& model) {
    const DimensionlessMeans etas = model.dimensionless_means();
    const auto v = model.spectrum().values();
    CompensatedSum num, den;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double e2 = etas.etas[i] * etas.etas[i];
        num += v[i] * v[i] * (1.0 + 2.0 * e2);
        den += v[i] * (1.0 + e2);
    }
    const double n = num.value();
    const double d = den.value();
    std::vector<double> grad(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double e2 = etas.etas[i] * etas.etas[i];
        const double sigma = std::sqrt(v[i]);
        grad[i] = 4.0 * sigma * (v[i] * (1.0 + 2.0 * e2) * d - n * (1.0 + e2)) / (d * d * d);
    }
    return grad;
}

std::vector<double> project_to_gauge(const DimensionlessMeans& etas, std::span<const double> eigenvalues) {
    if (etas.size() != eigenvalues.size()) throw std::invalid_argument("project_to_gauge: length mismatch");
    CompensatedSum den;
    for (std::size_t i = 0; i < eigenvalues.size(); ++i) den += eigenvalues[i] * (1.0 + etas.etas[i] * etas.etas[i]);
    const double d = den.value();
    std::vector<double> out(eigenvalues.begin(), eigenvalues.end());
    for (double& x : out) x /= d;
    return out;
}

namespace {

// Euclidean projection onto {x : b.x = 1, x >= floor}: x_i = max(floor, y_i - lambda b_i)
// with lambda found by bisection (b.x is nonincreasing in lambda).
std::vector<double> project_weighted_simplex(std::span<const double> y, std::span<const double> b, double floor) {
    auto constraint = [&](double lambda) {
        CompensatedSum s;
        for (std::size_t i = 0; i < y.size(); ++i) s += b[i] * std::max(floor, y[i] - lambda * b[i]);
        return s.value();
    };
    double lo = -1.0;
    double hi = 1.0;
    while (constraint(lo) < 1.0) lo *= 2.0;
    while (constraint(hi) > 1.0) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (constraint(mid) > 1.0 ? lo : hi) = mid;
    }
    const double lambda = 0.5 * (lo + hi);
    std::vector<double> x(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) x[i] = std::max(floor, y[i] - lambda * b[i]);
    // Remove the residual bisection error along the constraint normal.
    CompensatedSum s;
    for (std::size_t i = 0; i < x.size(); ++i) s += b[i] * x[i];
    const double scale = 1.0 / s.value();
    for (double& xi : x) xi = std::max(floor, xi * scale);
    return x;
}

}  // namespace

MinimizerResult numerical_min_case3(const DimensionlessMeans& etas, const MinimizerOptions& options) {
    const std::size_t n = etas.size();
    if (n == 0) throw std::invalid_argument("numerical_min_case3: no dimensions");
    if (!(options.tol > 0.0)) throw std::invalid_argument("numerical_min_case3: tol must be positive");

    std::vector<double> a(n), b(n);
    CompensatedSum bsum;
    for (std::size_t i = 0; i < n; ++i) {
        const double e2 = etas.etas[i] * etas.etas[i];
        a[i] = 1.0 + 2.0 * e2;
        b[i] = 1.0 + e2;
        bsum += b[i];
    }
    if (options.floor * bsum.value() >= 1.0) {
        throw std::invalid_argument("numerical_min_case3: eigenvalue floor is infeasible for this gauge");
    }

    auto objective = [&](std::span<const double> v) { return case3_variance_fixed_eta(etas, v); };
    auto gradient = [&](std::span<const double> v) {
        CompensatedSum num, den;
        for (std::size_t i = 0; i < n; ++i) {
            num += a[i] * v[i] * v[i];
            den += b[i] * v[i];
        }
        const double nv = num.value();
        const double d = den.value();
        std::vector<double> g(n);
        for (std::size_t i = 0; i < n; ++i) g[i] = 2.0 * (a[i] * v[i] * d - nv * b[i]) / (d * d * d);
        return g;
    };

    std::vector<double> x(n, 1.0 / bsum.value());
    double f = objective(x);
    double step = 1.0;
    double mapping_norm = 0.0;

    for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
        const std::vector<double> g = gradient(x);

        // Stationarity: gradient mapping x - P(x - g) at unit step.
        {
            std::vector<double> y(n);
            for (std::size_t i = 0; i < n; ++i) y[i] = x[i] - g[i];
            const std::vector<double> p = project_weighted_simplex(y, b, options.floor);
            mapping_norm = 0.0;
            for (std::size_t i = 0; i < n; ++i) mapping_norm = std::max(mapping_norm, std::fabs(p[i] - x[i]));
        }
        if (mapping_norm <= options.tol) return {Spectrum(x), iter, mapping_norm};

        // Armijo backtracking. Once the predicted decrease drops below the
        // rounding level of f, values no longer order the trials, so accept
        // on the directional derivative alone: phi'(1) <= |phi'(0)| / 2
        // bounds the overshoot along the step for a locally quadratic f.
        const double rounding = 4.0 * std::numeric_limits<double>::epsilon() * std::fabs(f);
        step = std::min(step * 2.0, 1e6);
        std::vector<double> trial;
        double f_trial = f;
        for (int halvings = 0;; ++halvings) {
            std::vector<double> y(n);
            for (std::size_t i = 0; i < n; ++i) y[i] = x[i] - step * g[i];
            trial = project_weighted_simplex(y, b, options.floor);
            double decrease = 0.0;
            for (std::size_t i = 0; i < n; ++i) decrease += g[i] * (trial[i] - x[i]);
            f_trial = objective(trial);
            bool accept;
            if (std::fabs(decrease) > rounding) {
                accept = f_trial <= f + options.armijo * decrease;
            } else {
                const std::vector<double> g_trial = gradient(trial);
                double slope = 0.0;
                for (std::size_t i = 0; i < n; ++i) slope += g_trial[i] * (trial[i] - x[i]);
                accept = decrease < 0.0 && slope <= -0.5 * decrease;
            }
            if (accept) break;
            if (halvings >= 60) {
                throw ConvergenceError("numerical_min_case3: line search failed", x, mapping_norm);
            }
            step *= 0.5;
        }
        x = std::move(trial);
        f = f_trial;
    }
    throw ConvergenceError("numerical_min_case3: no convergence within the iteration cap", x, mapping_norm);
}

}  // namespace cosvar

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "cosvar/moments.hpp"

namespace cosvar {

/// Variance-minimizing spectrum for fixed dimensionless means:
/// eigenvalue_i = scale * w_i with w_i = (1 + eta_i^2) / (1 + 2 eta_i^2).
struct OptimalSpectrum {
    std::vector<double> etas;
    std::vector<double> weights;
    double scale = 1.0;
    std::vector<double> eigenvalues;

    Spectrum spectrum() const { return Spectrum(eigenvalues); }
};

double optimal_weight(double eta) noexcept;

OptimalSpectrum optimal_spectrum(const DimensionlessMeans& etas, double scale = 1.0);

/// sum w^2 (1 + 2 eta^2) / (sum w (1 + eta^2))^2; exactly 1/n at eta = 0.
double min_variance(const DimensionlessMeans& etas);

/// Case-3 cosine variance written with eta held fixed:
/// sum s^4 (1 + 2 eta^2) / (sum s^2 (1 + eta^2))^2, s^2 the eigenvalues.
double case3_variance_fixed_eta(const DimensionlessMeans& etas, std::span<const double> eigenvalues);

/// Gradient of case3_variance_fixed_eta with respect to the standard
/// deviations sigma_i (not the variances), etas taken from the model.
std::vector<double> case3_variance_gradient(const GaussianModel& model);

/// Rescale eigenvalues onto the gauge sum v_i (1 + eta_i^2) = 1.
std::vector<double> project_to_gauge(const DimensionlessMeans& etas, std::span<const double> eigenvalues);

struct MinimizerOptions {
    double tol = 1e-10;
    double floor = 1e-9;
    std::size_t max_iterations = 100000;
    double armijo = 1e-4;
};

struct MinimizerResult {
    Spectrum spectrum;          // gauge-normalized
    std::size_t iterations = 0;
    double gradient_norm = 0.0;
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, std::vector<double> last_iterate, double gradient_norm)
        : std::runtime_error(what), last_iterate_(std::move(last_iterate)), gradient_norm_(gradient_norm) {}

    const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }
    double gradient_norm() const noexcept { return gradient_norm_; }

private:
    std::vector<double> last_iterate_;
    double gradient_norm_;
};

/// Projected-gradient descent of the fixed-eta case-3 variance over
/// {sum v_i (1 + eta_i^2) = 1, v_i >= floor}, starting from the isotropic
/// point. Stops when the unit-step projected-gradient mapping x - P(x - grad)
/// falls to tol (max-norm).
MinimizerResult numerical_min_case3(const DimensionlessMeans& etas, const MinimizerOptions& options = {});

}  // namespace cosvar

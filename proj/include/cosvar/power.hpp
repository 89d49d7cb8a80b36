#pragma once

#include "cosvar/moments.hpp"
#include "cosvar/special.hpp"

namespace cosvar {

/// Class-vs-background comparison sharing one covariance spectrum.
/// Class means are zeta_i * sigma_i, background means eta_i * sigma_i.
struct PowerSpec {
    DimensionlessMeans class_etas;
    DimensionlessMeans background_etas;
    Spectrum spectrum;
    double alpha;

    PowerSpec(DimensionlessMeans class_etas, DimensionlessMeans background_etas, Spectrum spectrum, double alpha);

    GaussianModel class_model() const;
    GaussianModel background_model() const;
};

/// Upper-tail threshold: E_B + Q(1 - alpha) * SD_B.
double threshold_tau(const PowerSpec& spec);

/// (E_C - tau) / SD_C. Throws std::domain_error when Var_C is zero.
double delta(const PowerSpec& spec);

/// Phi(delta): probability a class pair's cosine exceeds tau.
double discriminative_power(const PowerSpec& spec);

struct PowerReport {
    CosineMoments background;
    CosineMoments klass;
    double tau = 0.0;
    double delta = 0.0;
    double power = 0.0;
};

PowerReport evaluate_power(const PowerSpec& spec);

}  // namespace cosvar

#include "cosvar/power.hpp"

#include <cmath>
#include <stdexcept>

namespace cosvar {

PowerSpec::PowerSpec(DimensionlessMeans class_etas_, DimensionlessMeans background_etas_, Spectrum spectrum_, double alpha_)
    : class_etas(std::move(class_etas_)),
      background_etas(std::move(background_etas_)),
      spectrum(std::move(spectrum_)),
      alpha(alpha_) {
    if (class_etas.size() != spectrum.size() || background_etas.size() != spectrum.size()) {
        throw std::invalid_argument("PowerSpec: class etas, background etas and spectrum must share one length");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("PowerSpec: alpha must lie in (0, 1)");
}

GaussianModel PowerSpec::class_model() const {
    return GaussianModel::from_dimensionless(class_etas, spectrum);
}

GaussianModel PowerSpec::background_model() const {
    return GaussianModel::from_dimensionless(background_etas, spectrum);
}

namespace {

double tau_from(const CosineMoments& background, double alpha) {
    return background.mean + normal_quantile(1.0 - alpha) * std::sqrt(background.variance);
}

}  // namespace

double threshold_tau(const PowerSpec& spec) {
    return tau_from(case3_moments(spec.background_model()), spec.alpha);
}

PowerReport evaluate_power(const PowerSpec& spec) {
    PowerReport r;
    r.background = case3_moments(spec.background_model());
    r.klass = case3_moments(spec.class_model());
    if (!(r.klass.variance > 0.0)) throw std::domain_error("delta: class cosine variance is zero");
    r.tau = tau_from(r.background, spec.alpha);
    r.delta = (r.klass.mean - r.tau) / std::sqrt(r.klass.variance);
    r.power = normal_cdf(r.delta);
    return r;
}

double delta(const PowerSpec& spec) {
    return evaluate_power(spec).delta;
}

double discriminative_power(const PowerSpec& spec) {
    return evaluate_power(spec).power;
}

}  // namespace cosvar

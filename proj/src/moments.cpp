#include "cosvar/moments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cosvar/special.hpp"

namespace cosvar {

Spectrum::Spectrum(std::vector<double> eigenvalues) : values_(std::move(eigenvalues)) {
    if (values_.empty()) {
        throw std::invalid_argument("Spectrum: at least one eigenvalue is required");
    }
    double largest = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double v = values_[i];
        if (!std::isfinite(v) || !(v > 0.0)) {
            throw std::invalid_argument("Spectrum: eigenvalue " + std::to_string(i) + " must be positive and finite");
        }
        largest = std::max(largest, v);
    }
    const double floor = kRelativeFloor * largest;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (values_[i] < floor) {
            throw std::invalid_argument("Spectrum: eigenvalue " + std::to_string(i) +
                                        " is below 1e-12 of the largest; reduce the dimension first");
        }
    }
}

Spectrum Spectrum::isotropic(std::size_t n, double value) {
    return Spectrum(std::vector<double>(n, value));
}

Spectrum Spectrum::scaled(double k) const {
    std::vector<double> out(values_);
    for (double& v : out) v *= k;
    return Spectrum(std::move(out));
}

Spectrum Spectrum::tiled(std::size_t r) const {
    std::vector<double> out;
    out.reserve(values_.size() * r);
    for (std::size_t i = 0; i < r; ++i) out.insert(out.end(), values_.begin(), values_.end());
    return Spectrum(std::move(out));
}

DimensionlessMeans::DimensionlessMeans(std::vector<double> values) : etas(std::move(values)) {
    for (double e : etas) {
        if (!std::isfinite(e)) throw std::invalid_argument("DimensionlessMeans: values must be finite");
    }
}

GaussianModel::GaussianModel(std::vector<double> means, Spectrum spectrum)
    : means_(std::move(means)), spectrum_(std::move(spectrum)) {
    if (means_.size() != spectrum_.size()) {
        throw std::invalid_argument("GaussianModel: " + std::to_string(means_.size()) + " means for " +
                                    std::to_string(spectrum_.size()) + " eigenvalues");
    }
    for (double m : means_) {
        if (!std::isfinite(m)) throw std::invalid_argument("GaussianModel: means must be finite");
    }
}

GaussianModel GaussianModel::centered(Spectrum spectrum) {
    std::vector<double> zeros(spectrum.size(), 0.0);
    return GaussianModel(std::move(zeros), std::move(spectrum));
}

GaussianModel GaussianModel::from_dimensionless(const DimensionlessMeans& etas, Spectrum spectrum) {
    if (etas.size() != spectrum.size()) {
        throw std::invalid_argument("GaussianModel: eta and spectrum lengths differ");
    }
    std::vector<double> means(etas.size());
    for (std::size_t i = 0; i < means.size(); ++i) means[i] = etas.etas[i] * std::sqrt(spectrum[i]);
    return GaussianModel(std::move(means), std::move(spectrum));
}

DimensionlessMeans GaussianModel::dimensionless_means() const {
    std::vector<double> etas(size());
    for (std::size_t i = 0; i < etas.size(); ++i) etas[i] = means_[i] / std::sqrt(spectrum_[i]);
    return DimensionlessMeans(std::move(etas));
}

double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty()) {
        throw std::invalid_argument("cosine: vectors must be nonempty and of equal length");
    }
    double dot = 0.0;
    double aa = 0.0;
    double bb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    if (aa == 0.0) throw std::domain_error("cosine: first argument has zero norm");
    if (bb == 0.0) throw std::domain_error("cosine: second argument has zero norm");
    return std::clamp(dot / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

CosineMoments case1_moments(std::size_t n) {
    if (n == 0) throw std::domain_error("case1_moments: dimension must be at least 1");
    return {0.0, 1.0 / static_cast<double>(n), MomentKind::Exact};
}

double case1_density(double x, std::size_t n) {
    if (n < 2) throw std::domain_error("case1_density: dimension must be at least 2");
    if (!(std::fabs(x) <= 1.0)) throw std::domain_error("case1_density: x must lie in [-1, 1]");
    const double nd = static_cast<double>(n);
    const double exponent = (nd - 3.0) / 2.0;
    const double log_norm = -log_beta(0.5, (nd - 1.0) / 2.0);
    const double base = (1.0 - x) * (1.0 + x);
    if (base == 0.0) {
        if (exponent > 0.0) return 0.0;
        if (exponent < 0.0) return INFINITY;
        return std::exp(log_norm);
    }
    return std::exp(log_norm + exponent * std::log(base));
}

namespace {

struct MomentSums {
    double mean_sq = 0.0;    // sum mu^2
    double total = 0.0;      // sum (mu^2 + s^2)
    double var_num = 0.0;    // sum s^2 (s^2 + 2 mu^2)
};

MomentSums moment_sums(std::span<const double> means, std::span<const double> vars) {
    CompensatedSum m2, tot, num;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        const double mu2 = means[i] * means[i];
        m2 += mu2;
        tot += mu2 + vars[i];
        num += vars[i] * (vars[i] + 2.0 * mu2);
    }
    return {m2.value(), tot.value(), num.value()};
}

}  // namespace

CosineMoments case2_variance(const Spectrum& spectrum) {
    // Same arithmetic as case3_moments with zero means, so the two agree bit for bit.
    const std::vector<double> zeros(spectrum.size(), 0.0);
    const MomentSums s = moment_sums(zeros, spectrum.values());
    return {0.0, s.var_num / (s.total * s.total), MomentKind::AsymptoticApprox};
}

CosineMoments case3_moments(const GaussianModel& model) {
    const MomentSums s = moment_sums(model.means(), model.spectrum().values());
    return {s.mean_sq / s.total, s.var_num / (s.total * s.total), MomentKind::AsymptoticApprox};
}

std::vector<double> case2_variance_gradient(const Spectrum& spectrum) {
    const auto v = spectrum.values();
    CompensatedSum s1, s2;
    for (double x : v) {
        s1 += x;
        s2 += x * x;
    }
    const double sum = s1.value();
    const double sum_sq = s2.value();
    const double scale = 2.0 / (sum * sum * sum);
    std::vector<double> grad(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) grad[i] = scale * (sum * v[i] - sum_sq);
    return grad;
}

NormMoments norm_moments(const GaussianModel& model) {
    const auto mu = model.means();
    const auto var = model.spectrum().values();
    CompensatedSum mean_sq, var_sq;
    for (std::size_t i = 0; i < var.size(); ++i) {
        const double mu2 = mu[i] * mu[i];
        mean_sq += var[i] + mu2;
        var_sq += 2.0 * var[i] * (var[i] + 2.0 * mu2);
    }
    NormMoments out;
    out.mean_sq = mean_sq.value();
    out.var_sq = var_sq.value();
    out.jensen_upper_bound_mean = std::sqrt(out.mean_sq);
    return out;
}

double norm_concentration_ratio(const GaussianModel& model) {
    const NormMoments m = norm_moments(model);
    return std::sqrt(m.var_sq) / m.mean_sq;
}

std::complex<double> char_product_normal(double t, double mu1, double var1, double mu2, double var2) {
    if (!(var1 > 0.0) || !(var2 > 0.0)) throw std::domain_error("char_product_normal: variances must be positive");
    const double g = 1.0 + var1 * var2 * t * t;
    const std::complex<double> exponent(-(mu1 * mu1 * var2 + mu2 * mu2 * var1) * t * t / (2.0 * g), mu1 * mu2 * t / g);
    return std::exp(exponent) / std::sqrt(g);
}

std::complex<double> char_square_normal(double t, double mu, double var) {
    if (!(var > 0.0)) throw std::domain_error("char_square_normal: variance must be positive");
    const std::complex<double> denom(1.0, -2.0 * var * t);
    const std::complex<double> i_t(0.0, t);
    return std::exp(i_t * (mu * mu) / denom) / std::sqrt(denom);
}

double cf_step(double parameter_scale) noexcept {
    return 1e-4 / (1.0 + std::fabs(parameter_scale));
}

}  // namespace cosvar

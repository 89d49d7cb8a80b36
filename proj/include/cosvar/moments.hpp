#pragma once

#include <complex>
#include <span>
#include <vector>

namespace cosvar {

/// Covariance eigenvalues (per-axis variances in the diagonal basis).
///
/// Every entry must be finite and positive, and no entry may fall below
/// kRelativeFloor times the largest one: such an axis carries no variance
/// and the data should be projected onto the remaining subspace first.
class Spectrum {
public:
    static constexpr double kRelativeFloor = 1e-12;

    explicit Spectrum(std::vector<double> eigenvalues);

    static Spectrum isotropic(std::size_t n, double value = 1.0);

    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    Spectrum scaled(double k) const;
    /// The spectrum repeated r times end to end.
    Spectrum tiled(std::size_t r) const;

private:
    std::vector<double> values_;
};

/// Per-axis means divided by per-axis standard deviation.
struct DimensionlessMeans {
    std::vector<double> etas;

    explicit DimensionlessMeans(std::vector<double> values);
    static DimensionlessMeans zeros(std::size_t n) { return DimensionlessMeans(std::vector<double>(n, 0.0)); }
    std::size_t size() const noexcept { return etas.size(); }
};

/// Normal model in the covariance eigenbasis: mean vector plus spectrum.
class GaussianModel {
public:
    GaussianModel(std::vector<double> means, Spectrum spectrum);

    static GaussianModel centered(Spectrum spectrum);
    /// Means reconstructed as eta_i * sigma_i.
    static GaussianModel from_dimensionless(const DimensionlessMeans& etas, Spectrum spectrum);

    std::size_t size() const noexcept { return means_.size(); }
    std::span<const double> means() const noexcept { return means_; }
    const Spectrum& spectrum() const noexcept { return spectrum_; }
    DimensionlessMeans dimensionless_means() const;

private:
    std::vector<double> means_;
    Spectrum spectrum_;
};

enum class MomentKind { Exact, AsymptoticApprox };

struct CosineMoments {
    double mean = 0.0;
    double variance = 0.0;
    MomentKind kind = MomentKind::Exact;
};

struct NormMoments {
    double mean_sq = 0.0;        // E|X|^2
    double var_sq = 0.0;         // Var |X|^2 under normality
    double jensen_upper_bound_mean = 0.0;  // sqrt(E|X|^2) >= E|X|
};

/// a.b / (|a||b|), clamped to [-1, 1].
double cosine(std::span<const double> a, std::span<const double> b);

/// Isotropic centered normal: mean 0, variance 1/n (exact).
CosineMoments case1_moments(std::size_t n);

/// Density of cos(A, B) on [-1, 1] for isotropic centered normals,
/// (1 - x^2)^((n-3)/2) / B(1/2, (n-1)/2).
double case1_density(double x, std::size_t n);

/// Centered model: mean 0, variance sum(v^2) / (sum v)^2 with v the eigenvalues.
CosineMoments case2_variance(const Spectrum& spectrum);

/// General model. Mean sum(mu^2)/sum(mu^2+s^2),
/// variance sum(s^2 (s^2 + 2 mu^2)) / (sum(mu^2 + s^2))^2.
CosineMoments case3_moments(const GaussianModel& model);

/// d/dv_i of sum(v^2)/(sum v)^2 = 2 ((sum v) v_i - sum v^2) / (sum v)^3.
std::vector<double> case2_variance_gradient(const Spectrum& spectrum);

NormMoments norm_moments(const GaussianModel& model);

/// sd(|X|^2) / E|X|^2; sqrt(2/n) for the isotropic centered case.
double norm_concentration_ratio(const GaussianModel& model);

/// Characteristic function of XY, X ~ N(mu1, var1), Y ~ N(mu2, var2) independent.
std::complex<double> char_product_normal(double t, double mu1, double var1, double mu2, double var2);

/// Characteristic function of X^2, X ~ N(mu, var).
std::complex<double> char_square_normal(double t, double mu, double var);

/// First two raw moments recovered from a characteristic function by
/// Richardson-extrapolated central differences at t = 0.
struct RawMoments {
    double first = 0.0;
    double second = 0.0;
    double variance() const noexcept { return second - first * first; }
};

template <typename Cf>
RawMoments moments_from_cf(Cf&& phi, double step);

/// Default step for moments_from_cf: 1e-4 shrunk by the parameter scale.
double cf_step(double parameter_scale) noexcept;

}  // namespace cosvar

#include "cosvar/detail/moments_cf.hpp"

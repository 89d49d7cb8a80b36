#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "cosvar/linalg.hpp"
#include "cosvar/moments.hpp"
#include "cosvar/power.hpp"

namespace cosvar {

// Spectrum sources.
struct Isotropic {};
/// Two-stage gamma law: shape and rate ~ Gamma(1, rate 2), then eigenvalues ~ Gamma(shape, rate).
struct GammaHyper {};
using SpectrumSource = std::variant<Isotropic, GammaHyper, Spectrum>;

// Mean sources.
struct ZeroMeans {};
struct ConstantMeans {
    double value;
};
struct NormalMeans {
    double variance;
};
using MeanSource = std::variant<ZeroMeans, ConstantMeans, NormalMeans, std::vector<double>>;

struct SimConfig {
    std::uint64_t seed = 0;
    std::size_t dimension = 1;
    std::size_t num_vectors = 2;
    SpectrumSource spectrum_source = Isotropic{};
    MeanSource mean_source = ZeroMeans{};

    void validate() const;
};

/// Worker count for parallel loops; 0 picks the hardware concurrency.
/// Results never depend on it.
struct Workers {
    unsigned count = 0;
    unsigned resolved() const noexcept;
};

/// Run body(i) for i in [0, n) on up to `workers` threads, cyclic assignment.
void parallel_for(std::size_t n, Workers workers, const std::function<void(std::size_t)>& body);

struct GammaHyperparameters {
    double shape;
    double rate;
};

struct GammaSpectrumDraw {
    GammaHyperparameters hyper;
    Spectrum spectrum;
    unsigned retries = 0;
};

GammaSpectrumDraw sample_spectrum_gamma_detailed(std::uint64_t seed, std::size_t n);
Spectrum sample_spectrum_gamma(std::uint64_t seed, std::size_t n);

/// Model implied by a config's sources; deterministic in (seed, dimension).
GaussianModel resolve_model(const SimConfig& config);

/// Rows i.i.d. N(means, diag(spectrum)); row r draws from stream (seed, r).
Matrix sample_gaussian_matrix(const GaussianModel& model, std::size_t num_vectors, std::uint64_t seed, Workers workers = {});
Matrix sample_gaussian_matrix(const SimConfig& config, Workers workers = {});

/// All unordered-pair cosines (i < j) in row-major pair order.
std::vector<double> all_pair_cosines(const Matrix& rows, Workers workers = {});

struct CosineStats {
    double mean = 0.0;
    double variance = 0.0;  // 1/(m-1) estimator
    std::size_t num_pairs = 0;
};

CosineStats empirical_cosine_stats(const Matrix& rows, Workers workers = {});
CosineStats summarize(std::span<const double> values);

double pearson_correlation(std::span<const double> xs, std::span<const double> ys);

struct ExperimentRow {
    std::size_t dimension = 0;
    double theory_variance = 0.0;
    double empirical_variance = 0.0;
    double theory_mean = 0.0;
    double empirical_mean = 0.0;
    std::size_t num_pairs = 0;
    std::uint64_t seed = 0;
};

struct ExperimentResult {
    std::vector<ExperimentRow> rows;
    std::optional<double> pearson_variance;
    std::optional<double> pearson_mean;
};

/// Rounded log-spaced integers in [lo, hi]; duplicates are kept.
std::vector<std::size_t> log_spaced_dims(std::size_t lo, std::size_t hi, std::size_t count);
std::vector<std::size_t> linear_dims(std::size_t lo, std::size_t hi, std::size_t step);

ExperimentResult run_case1_experiment(const std::vector<std::size_t>& dims, std::size_t num_vectors, std::uint64_t seed,
                                      Workers workers = {});

struct SweepOptions {
    std::vector<std::size_t> dims;
    std::size_t num_vectors = 1000;
    std::size_t spectra_per_dim = 1;
    std::size_t repeats = 1;
    std::uint64_t seed = 0;
    SpectrumSource spectrum_source = GammaHyper{};
    MeanSource mean_source = ZeroMeans{};
};

/// Centered sweep; theory column is case2_variance. Mean source is ignored.
ExperimentResult run_case2_experiment(SweepOptions options, Workers workers = {});
/// General sweep; theory columns from case3_moments. Shares the seed path
/// of run_case2_experiment, so zero means reproduce it exactly.
ExperimentResult run_case3_experiment(SweepOptions options, Workers workers = {});

struct NormRow {
    std::size_t dimension = 0;
    std::size_t draw = 0;
    double jensen_bound = 0.0;
    double mean_norm = 0.0;
    double sd_norm = 0.0;
    double ratio_to_bound = 0.0;
    double sd_over_mean = 0.0;
    std::size_t num_vectors = 0;
    std::uint64_t seed = 0;
};

struct NormOptions {
    std::vector<std::size_t> dims;
    std::size_t vectors_per_draw = 100;
    std::size_t draws = 20;
    std::size_t draws_per_spectrum = 5;
    std::uint64_t seed = 0;
    SpectrumSource spectrum_source = GammaHyper{};
    MeanSource mean_source = ZeroMeans{};
};

std::vector<NormRow> run_norm_experiment(const NormOptions& options, Workers workers = {});

struct KsResult {
    double statistic = 0.0;
    double p_value = 0.0;
    std::size_t samples = 0;
};

/// One-sample Kolmogorov-Smirnov test; sorts `samples` in place.
KsResult ks_test(std::vector<double>& samples, const std::function<double(double)>& cdf);
double kolmogorov_survival(double lambda);

/// KS test of (1 + cos)/2 over independent isotropic pairs against
/// Beta((n-1)/2, (n-1)/2).
KsResult case1_exact_law_test(std::size_t n, std::size_t num_pairs, std::uint64_t seed, Workers workers = {});

struct GapRow {
    std::size_t dimension = 0;
    double mean_sq_gap = 0.0;
    std::size_t num_pairs = 0;
};

struct GapResult {
    std::vector<GapRow> rows;
    double slope = 0.0;
};

/// Mean squared difference between cos and the norm-replaced cosine
/// a.b / E|X|^2 over independent pairs, and its fitted log-log slope in n.
GapResult run_cosine_gap_experiment(const std::vector<std::size_t>& dims, std::size_t num_pairs, std::uint64_t seed,
                                    SpectrumSource spectrum_source, MeanSource mean_source, Workers workers = {});

/// Least-squares slope of log(ys) on log(xs).
double log_log_slope(std::span<const double> xs, std::span<const double> ys);

struct PowerSimulation {
    double empirical_power = 0.0;
    double model_power = 0.0;
    std::size_t num_pairs = 0;
};

/// Fraction of independent class pairs whose cosine exceeds the model
/// threshold tau(alpha).
PowerSimulation simulate_power(const PowerSpec& spec, std::size_t num_pairs, std::uint64_t seed, Workers workers = {});

}  // namespace cosvar

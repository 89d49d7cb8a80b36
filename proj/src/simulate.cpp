#include "cosvar/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include <boost/math/special_functions/beta.hpp>

#include "cosvar/rng.hpp"
#include "cosvar/special.hpp"

namespace cosvar {

namespace {

// Stream tags; every random quantity is keyed by (seed, tag, indices...).
enum Tag : std::uint64_t {
    kTagHyper = 1,
    kTagEigen,
    kTagSpectrum,
    kTagMeans,
    kTagRow,
    kTagCase1,
    kTagSweep,
    kTagSamples,
    kTagNorm,
    kTagKs,
    kTagGap,
    kTagPair,
    kTagPower,
};

constexpr unsigned kMaxGammaRetries = 100;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

void SimConfig::validate() const {
    if (dimension == 0) throw std::invalid_argument("SimConfig: dimension must be positive");
    if (num_vectors < 2) throw std::invalid_argument("SimConfig: at least two vectors are needed to form pairs");
    if (const auto* normal = std::get_if<NormalMeans>(&mean_source); normal && !(normal->variance > 0.0)) {
        throw std::invalid_argument("SimConfig: mean variance must be positive");
    }
}

unsigned Workers::resolved() const noexcept {
    if (count > 0) return count;
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, Workers workers, const std::function<void(std::size_t)>& body) {
    const std::size_t threads = std::min<std::size_t>(workers.resolved(), n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                // Cyclic assignment balances the triangular all-pairs workload.
                for (std::size_t i = t; i < n; i += threads) body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

GammaSpectrumDraw sample_spectrum_gamma_detailed(std::uint64_t seed, std::size_t n) {
    if (n == 0) throw std::invalid_argument("sample_spectrum_gamma: n must be positive");
    unsigned retries = 0;
    for (std::uint64_t attempt = 0; attempt <= kMaxGammaRetries; ++attempt) {
        Stream hyper_stream(seed, {kTagHyper, attempt});
        const GammaHyperparameters hyper{hyper_stream.gamma(1.0, 2.0), hyper_stream.gamma(1.0, 2.0)};
        if (!(hyper.shape > 0.0) || !(hyper.rate > 0.0)) {
            ++retries;
            continue;
        }

        Stream eigen_stream(seed, {kTagEigen, attempt});
        std::vector<double> values(n);
        for (double& v : values) v = eigen_stream.gamma(hyper.shape, hyper.rate);

        // Redraw entries that underflow or fall below the spectrum floor
        // relative to the current maximum; give up on these hyperparameters
        // after the retry cap.
        bool ok = false;
        for (unsigned round = 0; round <= kMaxGammaRetries; ++round) {
            const double largest = *std::max_element(values.begin(), values.end());
            if (!(largest > 0.0) || !std::isfinite(largest)) break;
            const double floor = Spectrum::kRelativeFloor * largest;
            bool redrew = false;
            for (double& v : values) {
                if (!(v >= floor) || v < std::numeric_limits<double>::min()) {
                    v = eigen_stream.gamma(hyper.shape, hyper.rate);
                    ++retries;
                    redrew = true;
                }
            }
            if (!redrew) {
                ok = true;
                break;
            }
        }
        if (ok) return {hyper, Spectrum(std::move(values)), retries};
        ++retries;
    }
    throw std::runtime_error("sample_spectrum_gamma: exceeded the resampling cap");
}

Spectrum sample_spectrum_gamma(std::uint64_t seed, std::size_t n) {
    return sample_spectrum_gamma_detailed(seed, n).spectrum;
}

GaussianModel resolve_model(const SimConfig& config) {
    if (config.dimension == 0) throw std::invalid_argument("resolve_model: dimension must be positive");
    const std::size_t n = config.dimension;

    Spectrum spectrum = std::visit(
        overloaded{
            [&](const Isotropic&) { return Spectrum::isotropic(n); },
            [&](const GammaHyper&) { return sample_spectrum_gamma(derive_seed(config.seed, {kTagSpectrum}), n); },
            [&](const Spectrum& s) {
                if (s.size() != n) throw std::invalid_argument("resolve_model: explicit spectrum length differs from dimension");
                return s;
            },
        },
        config.spectrum_source);

    std::vector<double> means = std::visit(
        overloaded{
            [&](const ZeroMeans&) { return std::vector<double>(n, 0.0); },
            [&](const ConstantMeans& c) { return std::vector<double>(n, c.value); },
            [&](const NormalMeans& nm) {
                if (!(nm.variance > 0.0)) throw std::invalid_argument("resolve_model: mean variance must be positive");
                Stream s(config.seed, {kTagMeans});
                const double sd = std::sqrt(nm.variance);
                std::vector<double> out(n);
                for (double& m : out) m = sd * s.normal();
                return out;
            },
            [&](const std::vector<double>& explicit_means) {
                if (explicit_means.size() != n) throw std::invalid_argument("resolve_model: explicit means length differs from dimension");
                return explicit_means;
            },
        },
        config.mean_source);

    return GaussianModel(std::move(means), std::move(spectrum));
}

Matrix sample_gaussian_matrix(const GaussianModel& model, std::size_t num_vectors, std::uint64_t seed, Workers workers) {
    const std::size_t n = model.size();
    const auto mu = model.means();
    std::vector<double> sd(n);
    for (std::size_t j = 0; j < n; ++j) sd[j] = std::sqrt(model.spectrum()[j]);

    Matrix out(num_vectors, n);
    parallel_for(num_vectors, workers, [&](std::size_t r) {
        Stream s(seed, {kTagRow, r});
        auto row = out.row(r);
        for (std::size_t j = 0; j < n; ++j) row[j] = mu[j] + sd[j] * s.normal();
    });
    return out;
}

Matrix sample_gaussian_matrix(const SimConfig& config, Workers workers) {
    config.validate();
    return sample_gaussian_matrix(resolve_model(config), config.num_vectors, derive_seed(config.seed, {kTagSamples}),
                                  workers);
}

namespace {

double dot(const double* a, const double* b, std::size_t n) noexcept {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        s0 += a[k] * b[k];
        s1 += a[k + 1] * b[k + 1];
        s2 += a[k + 2] * b[k + 2];
        s3 += a[k + 3] * b[k + 3];
    }
    for (; k < n; ++k) s0 += a[k] * b[k];
    return (s0 + s1) + (s2 + s3);
}

Matrix normalized_rows(const Matrix& rows, Workers workers) {
    Matrix unit = rows;
    std::vector<double> norms(rows.rows());
    parallel_for(rows.rows(), workers, [&](std::size_t r) {
        auto row = rows.row(r);
        norms[r] = std::sqrt(dot(row.data(), row.data(), row.size()));
    });
    for (std::size_t r = 0; r < rows.rows(); ++r) {
        if (!(norms[r] > 0.0)) throw std::domain_error("cosine: row " + std::to_string(r) + " has zero norm");
        for (double& x : unit.row(r)) x /= norms[r];
    }
    return unit;
}

double pair_cosine(const double* a, const double* b, std::size_t n) {
    const double c = dot(a, b, n) / std::sqrt(dot(a, a, n) * dot(b, b, n));
    return std::clamp(c, -1.0, 1.0);
}

}  // namespace

std::vector<double> all_pair_cosines(const Matrix& rows, Workers workers) {
    const std::size_t m = rows.rows();
    if (m < 2) throw std::invalid_argument("all_pair_cosines: at least two rows are required");
    const Matrix unit = normalized_rows(rows, workers);
    const std::size_t n = rows.cols();
    std::vector<double> out(m * (m - 1) / 2);
    parallel_for(m - 1, workers, [&](std::size_t i) {
        std::size_t idx = i * m - i * (i + 1) / 2;
        const double* a = unit.row(i).data();
        for (std::size_t j = i + 1; j < m; ++j) {
            out[idx++] = std::clamp(dot(a, unit.row(j).data(), n), -1.0, 1.0);
        }
    });
    return out;
}

CosineStats summarize(std::span<const double> values) {
    if (values.size() < 2) throw std::invalid_argument("summarize: at least two values are required");
    CompensatedSum total;
    for (double x : values) total += x;
    const double mean = total.value() / static_cast<double>(values.size());
    CompensatedSum centered;
    for (double x : values) centered += (x - mean) * (x - mean);
    return {mean, centered.value() / static_cast<double>(values.size() - 1), values.size()};
}

CosineStats empirical_cosine_stats(const Matrix& rows, Workers workers) {
    const std::vector<double> cosines = all_pair_cosines(rows, workers);
    return summarize(cosines);
}

double pearson_correlation(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw std::invalid_argument("pearson_correlation: need two equal-length lists of at least two values");
    }
    const double n = static_cast<double>(xs.size());
    const double mx = compensated_sum(xs) / n;
    const double my = compensated_sum(ys) / n;
    CompensatedSum sxy, sxx, syy;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (!(sxx.value() > 0.0) || !(syy.value() > 0.0)) {
        throw std::domain_error("pearson_correlation: a list has zero variance");
    }
    return std::clamp(sxy.value() / std::sqrt(sxx.value() * syy.value()), -1.0, 1.0);
}

std::vector<std::size_t> log_spaced_dims(std::size_t lo, std::size_t hi, std::size_t count) {
    if (lo == 0 || hi < lo || count == 0) throw std::invalid_argument("log_spaced_dims: need 0 < lo <= hi and count > 0");
    std::vector<std::size_t> out(count);
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    const double a = std::log(static_cast<double>(lo));
    const double b = std::log(static_cast<double>(hi));
    for (std::size_t i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(count - 1);
        out[i] = static_cast<std::size_t>(std::llround(std::exp(a + t * (b - a))));
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<std::size_t> linear_dims(std::size_t lo, std::size_t hi, std::size_t step) {
    if (lo == 0 || hi < lo || step == 0) throw std::invalid_argument("linear_dims: need 0 < lo <= hi and step > 0");
    std::vector<std::size_t> out;
    for (std::size_t d = lo; d <= hi; d += step) out.push_back(d);
    return out;
}

namespace {

std::optional<double> try_pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() < 2) return std::nullopt;
    try {
        return pearson_correlation(xs, ys);
    } catch (const std::domain_error&) {
        return std::nullopt;
    }
}

void attach_pearson(ExperimentResult& result, bool with_mean) {
    std::vector<double> tv, ev, tm, em;
    for (const auto& r : result.rows) {
        tv.push_back(r.theory_variance);
        ev.push_back(r.empirical_variance);
        tm.push_back(r.theory_mean);
        em.push_back(r.empirical_mean);
    }
    result.pearson_variance = try_pearson(tv, ev);
    if (with_mean) result.pearson_mean = try_pearson(tm, em);
}

}  // namespace

ExperimentResult run_case1_experiment(const std::vector<std::size_t>& dims, std::size_t num_vectors, std::uint64_t seed,
                                      Workers workers) {
    if (dims.empty()) throw std::invalid_argument("run_case1_experiment: dims must be nonempty");
    if (num_vectors < 2) throw std::invalid_argument("run_case1_experiment: at least two vectors are required");
    ExperimentResult result;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        const std::uint64_t cell = derive_seed(seed, {kTagCase1, k});
        const GaussianModel model = GaussianModel::centered(Spectrum::isotropic(dims[k]));
        const Matrix sample = sample_gaussian_matrix(model, num_vectors, derive_seed(cell, {kTagSamples, 0}), workers);
        const CosineStats stats = empirical_cosine_stats(sample, workers);
        const CosineMoments theory = case1_moments(dims[k]);
        result.rows.push_back({dims[k], theory.variance, stats.variance, theory.mean, stats.mean, stats.num_pairs, cell});
    }
    attach_pearson(result, false);
    return result;
}

namespace {

ExperimentResult run_sweep(const SweepOptions& options, bool centered, Workers workers) {
    if (options.dims.empty()) throw std::invalid_argument("experiment: dims must be nonempty");
    if (options.num_vectors < 2) throw std::invalid_argument("experiment: at least two vectors are required");
    if (options.spectra_per_dim == 0 || options.repeats == 0) {
        throw std::invalid_argument("experiment: spectra_per_dim and repeats must be positive");
    }
    ExperimentResult result;
    for (std::size_t k = 0; k < options.dims.size(); ++k) {
        for (std::size_t s = 0; s < options.spectra_per_dim; ++s) {
            const std::uint64_t cell = derive_seed(options.seed, {kTagSweep, k, s});
            SimConfig config;
            config.seed = cell;
            config.dimension = options.dims[k];
            config.num_vectors = options.num_vectors;
            config.spectrum_source = options.spectrum_source;
            config.mean_source = centered ? MeanSource{ZeroMeans{}} : options.mean_source;
            config.validate();
            const GaussianModel model = resolve_model(config);
            const CosineMoments theory = centered ? case2_variance(model.spectrum()) : case3_moments(model);
            for (std::size_t r = 0; r < options.repeats; ++r) {
                const Matrix sample =
                    sample_gaussian_matrix(model, options.num_vectors, derive_seed(cell, {kTagSamples, r}), workers);
                const CosineStats stats = empirical_cosine_stats(sample, workers);
                result.rows.push_back(
                    {options.dims[k], theory.variance, stats.variance, theory.mean, stats.mean, stats.num_pairs, cell});
            }
        }
    }
    attach_pearson(result, !centered);
    return result;
}

}  // namespace

ExperimentResult run_case2_experiment(SweepOptions options, Workers workers) {
    return run_sweep(options, true, workers);
}

ExperimentResult run_case3_experiment(SweepOptions options, Workers workers) {
    return run_sweep(options, false, workers);
}

std::vector<NormRow> run_norm_experiment(const NormOptions& options, Workers workers) {
    if (options.dims.empty()) throw std::invalid_argument("run_norm_experiment: dims must be nonempty");
    if (options.vectors_per_draw < 2 || options.draws == 0 || options.draws_per_spectrum == 0) {
        throw std::invalid_argument("run_norm_experiment: need >= 2 vectors, >= 1 draw and >= 1 draw per spectrum");
    }
    std::vector<NormRow> rows;
    for (std::size_t k = 0; k < options.dims.size(); ++k) {
        for (std::size_t d = 0; d < options.draws; ++d) {
            const std::size_t spectrum_index = d / options.draws_per_spectrum;
            const std::uint64_t cell = derive_seed(options.seed, {kTagNorm, k, spectrum_index});
            SimConfig config;
            config.seed = cell;
            config.dimension = options.dims[k];
            config.num_vectors = options.vectors_per_draw;
            config.spectrum_source = options.spectrum_source;
            config.mean_source = options.mean_source;
            config.validate();
            const GaussianModel model = resolve_model(config);
            const std::uint64_t sample_seed = derive_seed(cell, {kTagSamples, d});
            const Matrix sample = sample_gaussian_matrix(model, options.vectors_per_draw, sample_seed, workers);

            std::vector<double> norms(sample.rows());
            for (std::size_t r = 0; r < sample.rows(); ++r) {
                CompensatedSum sq;
                for (double x : sample.row(r)) sq += x * x;
                norms[r] = std::sqrt(sq.value());
            }
            const CosineStats stats = summarize(norms);

            NormRow row;
            row.dimension = options.dims[k];
            row.draw = d;
            row.jensen_bound = norm_moments(model).jensen_upper_bound_mean;
            row.mean_norm = stats.mean;
            row.sd_norm = std::sqrt(stats.variance);
            row.ratio_to_bound = stats.mean / row.jensen_bound;
            row.sd_over_mean = row.sd_norm / stats.mean;
            row.num_vectors = options.vectors_per_draw;
            row.seed = sample_seed;
            rows.push_back(row);
        }
    }
    return rows;
}

double kolmogorov_survival(double lambda) {
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 200; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += sign * term;
        if (term < 1e-17) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test(std::vector<double>& samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_test: no samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    const double root = std::sqrt(n);
    return {d, kolmogorov_survival((root + 0.12 + 0.11 / root) * d), samples.size()};
}

KsResult case1_exact_law_test(std::size_t n, std::size_t num_pairs, std::uint64_t seed, Workers workers) {
    if (n < 2) throw std::invalid_argument("case1_exact_law_test: dimension must be at least 2");
    if (num_pairs == 0) throw std::invalid_argument("case1_exact_law_test: no pairs");
    std::vector<double> u(num_pairs);
    parallel_for(num_pairs, workers, [&](std::size_t p) {
        Stream s(seed, {kTagKs, p});
        std::vector<double> a(n), b(n);
        for (double& x : a) x = s.normal();
        for (double& x : b) x = s.normal();
        u[p] = 0.5 * (1.0 + pair_cosine(a.data(), b.data(), n));
    });
    const double shape = 0.5 * static_cast<double>(n - 1);
    return ks_test(u, [shape](double x) {
        if (x <= 0.0) return 0.0;
        if (x >= 1.0) return 1.0;
        return boost::math::ibeta(shape, shape, x);
    });
}

double log_log_slope(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw std::invalid_argument("log_log_slope: need >= 2 paired points");
    std::vector<double> lx(xs.size()), ly(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw std::domain_error("log_log_slope: values must be positive");
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
    }
    const double n = static_cast<double>(lx.size());
    const double mx = compensated_sum(lx) / n;
    const double my = compensated_sum(ly) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    if (!(sxx > 0.0)) throw std::domain_error("log_log_slope: x values are all equal");
    return sxy / sxx;
}

GapResult run_cosine_gap_experiment(const std::vector<std::size_t>& dims, std::size_t num_pairs, std::uint64_t seed,
                                    SpectrumSource spectrum_source, MeanSource mean_source, Workers workers) {
    if (dims.size() < 2) throw std::invalid_argument("run_cosine_gap_experiment: need at least two dimensions");
    if (num_pairs == 0) throw std::invalid_argument("run_cosine_gap_experiment: no pairs");
    GapResult result;
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        SimConfig config;
        config.seed = derive_seed(seed, {kTagGap, k});
        config.dimension = dims[k];
        config.spectrum_source = spectrum_source;
        config.mean_source = mean_source;
        const GaussianModel model = resolve_model(config);
        const double expected_sq_norm = norm_moments(model).mean_sq;
        const std::size_t n = model.size();
        std::vector<double> sd(n);
        for (std::size_t j = 0; j < n; ++j) sd[j] = std::sqrt(model.spectrum()[j]);
        const auto mu = model.means();

        std::vector<double> gaps(num_pairs);
        parallel_for(num_pairs, workers, [&](std::size_t p) {
            Stream s(config.seed, {kTagPair, p});
            std::vector<double> a(n), b(n);
            for (std::size_t j = 0; j < n; ++j) a[j] = mu[j] + sd[j] * s.normal();
            for (std::size_t j = 0; j < n; ++j) b[j] = mu[j] + sd[j] * s.normal();
            const double d = dot(a.data(), b.data(), n);
            const double exact = d / std::sqrt(dot(a.data(), a.data(), n) * dot(b.data(), b.data(), n));
            const double approx = d / expected_sq_norm;
            gaps[p] = (exact - approx) * (exact - approx);
        });
        const double msg = compensated_sum(gaps) / static_cast<double>(num_pairs);
        result.rows.push_back({dims[k], msg, num_pairs});
        xs.push_back(static_cast<double>(dims[k]));
        ys.push_back(msg);
    }
    result.slope = log_log_slope(xs, ys);
    return result;
}

PowerSimulation simulate_power(const PowerSpec& spec, std::size_t num_pairs, std::uint64_t seed, Workers workers) {
    if (num_pairs == 0) throw std::invalid_argument("simulate_power: no pairs");
    const PowerReport report = evaluate_power(spec);
    const GaussianModel model = spec.class_model();
    const std::size_t n = model.size();
    std::vector<double> sd(n);
    for (std::size_t j = 0; j < n; ++j) sd[j] = std::sqrt(model.spectrum()[j]);
    const auto mu = model.means();

    std::vector<unsigned char> hit(num_pairs);
    parallel_for(num_pairs, workers, [&](std::size_t p) {
        Stream s(seed, {kTagPower, p});
        std::vector<double> a(n), b(n);
        for (std::size_t j = 0; j < n; ++j) a[j] = mu[j] + sd[j] * s.normal();
        for (std::size_t j = 0; j < n; ++j) b[j] = mu[j] + sd[j] * s.normal();
        hit[p] = pair_cosine(a.data(), b.data(), n) > report.tau ? 1 : 0;
    });
    std::size_t count = 0;
    for (unsigned char h : hit) count += h;
    return {static_cast<double>(count) / static_cast<double>(num_pairs), report.power, num_pairs};
}

}  // namespace cosvar

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "cosvar/optimize.hpp"
#include "test_support.hpp"

using namespace cosvar;

namespace {

DimensionlessMeans random_etas(std::mt19937_64& rng, std::size_t n, double sd = 1.5) {
    return DimensionlessMeans(testing::random_normals(rng, n, sd));
}

double max_gap(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("optimal weight reference values") {
    CHECK(optimal_weight(0.0) == 1.0);
    CHECK(std::fabs(optimal_weight(1.0) - 2.0 / 3.0) < 1e-16);
    // (1 + 1e6) / (1 + 2e6); the closed form rather than the rounded 0.5000005.
    CHECK(std::fabs(optimal_weight(1000.0) - 1000001.0 / 2000001.0) < 1e-16);
    CHECK(std::fabs(optimal_weight(1000.0) - 0.50000025) < 1e-12);
    CHECK(optimal_weight(-2.0) == optimal_weight(2.0));
}

TEST_CASE("optimal weight lies in (1/2, 1]") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> z(0.0, 30.0);
    for (int t = 0; t < 1000; ++t) {
        const double w = optimal_weight(z(rng));
        CHECK(w > 0.5);
        CHECK(w <= 1.0);
    }
}

TEST_CASE("optimal spectrum reference values") {
    const auto iso = optimal_spectrum(DimensionlessMeans::zeros(3));
    for (double v : iso.eigenvalues) CHECK(v == 1.0);
    const auto two = optimal_spectrum(DimensionlessMeans({0.0, 1.0}));
    CHECK(two.weights[0] == 1.0);
    CHECK(std::fabs(two.weights[1] - 2.0 / 3.0) < 1e-16);
    CHECK(two.eigenvalues[0] / two.eigenvalues[1] == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("optimal spectrum is scale equivariant") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> k(0.01, 100.0);
    for (int t = 0; t < 50; ++t) {
        const auto eta = random_etas(rng, 1 + t % 20);
        const auto base = optimal_spectrum(eta);
        const auto exact = optimal_spectrum(eta, 16.0);
        const double s = k(rng);
        const auto scaled = optimal_spectrum(eta, s);
        for (std::size_t i = 0; i < eta.size(); ++i) {
            CHECK(exact.eigenvalues[i] == 16.0 * base.eigenvalues[i]);
            CHECK(testing::rel_err(scaled.eigenvalues[i], s * base.eigenvalues[i]) < 1e-15);
        }
    }
    CHECK_THROWS_AS(optimal_spectrum(DimensionlessMeans({1.0}), 0.0), std::invalid_argument);
}

TEST_CASE("minimum variance reference values") {
    CHECK(std::fabs(min_variance(DimensionlessMeans({0.0, 1.0})) - 3.0 / 7.0) < 2e-16);
    for (std::size_t n : {1u, 2u, 4u, 8u, 64u, 1024u}) CHECK(min_variance(DimensionlessMeans::zeros(n)) * n == 1.0);
    for (std::size_t n = 1; n <= 100; ++n) {
        CAPTURE(n);
        CHECK(std::fabs(min_variance(DimensionlessMeans::zeros(n)) * n - 1.0) <= 2.3e-16);
    }
}

TEST_CASE("minimum variance equals the case-3 variance at the optimal spectrum") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 100; ++t) {
        const auto eta = random_etas(rng, 1 + t % 30);
        const auto opt = optimal_spectrum(eta, 0.37);
        const double direct = case3_moments(GaussianModel::from_dimensionless(eta, opt.spectrum())).variance;
        CHECK(testing::rel_err(direct, min_variance(eta)) < 1e-12);
        CHECK(testing::rel_err(case3_variance_fixed_eta(eta, opt.eigenvalues), min_variance(eta)) < 1e-13);
    }
}

TEST_CASE("optimal eigenvalues stay within a factor of two") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 1 + t % 50;
        const auto opt = optimal_spectrum(random_etas(rng, n, 10.0), 3.0);
        const auto [lo, hi] = std::minmax_element(opt.eigenvalues.begin(), opt.eigenvalues.end());
        CHECK(*hi / *lo <= 2.0);
    }
    // Approached only with one eta at zero and another large.
    const auto extreme = optimal_spectrum(DimensionlessMeans({0.0, 1e4}));
    CHECK(extreme.eigenvalues[0] / extreme.eigenvalues[1] > 1.9999999);
}

TEST_CASE("nonzero means never raise the minimum above 1/n") {
    // sum b^2/a >= n with a = 1 + 2 eta^2, b = 1 + eta^2.
    std::mt19937_64 rng(14);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 1 + t % 50;
        CHECK(min_variance(random_etas(rng, n, 3.0)) <= 1.0 / n * (1 + 1e-14));
    }
}

TEST_CASE("optimal spectrum beats every nearby spectrum on the gauge") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + t % 12;
        const auto eta = random_etas(rng, n);
        const auto opt = optimal_spectrum(eta);
        const double best = case3_variance_fixed_eta(eta, opt.eigenvalues);
        std::vector<double> perturbed = opt.eigenvalues;
        for (double& v : perturbed) v *= 1.0 + u(rng);
        perturbed = project_to_gauge(eta, perturbed);
        CHECK(case3_variance_fixed_eta(eta, perturbed) >= best * (1 - 1e-14));
    }
}

TEST_CASE("project_to_gauge lands on the gauge") {
    std::mt19937_64 rng(6);
    const auto eta = random_etas(rng, 7);
    const auto v = project_to_gauge(eta, testing::random_spectrum(rng, 7));
    double s = 0.0;
    for (std::size_t i = 0; i < 7; ++i) s += v[i] * (1 + eta.etas[i] * eta.etas[i]);
    CHECK(std::fabs(s - 1.0) < 1e-15);
}

TEST_CASE("case-3 gradient vanishes at the optimum") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 50; ++t) {
        const auto eta = random_etas(rng, 1 + t % 20);
        const auto opt = optimal_spectrum(eta);
        const auto g = case3_variance_gradient(GaussianModel::from_dimensionless(eta, opt.spectrum()));
        for (double x : g) CHECK(std::fabs(x) < 1e-10);
    }
}

TEST_CASE("case-3 gradient at zero means follows from the case-2 gradient by the chain rule") {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 50; ++t) {
        const Spectrum s(testing::random_spectrum(rng, 2 + t % 20));
        const auto g2 = case2_variance_gradient(s);
        const auto g3 = case3_variance_gradient(GaussianModel::centered(s));
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double chain = g2[i] * 2.0 * std::sqrt(s[i]);
            CHECK(std::fabs(g3[i] - chain) <= 1e-12 * std::max(1e-12, std::fabs(chain)) + 1e-300);
        }
    }
}

TEST_CASE("case-3 gradient matches finite differences in sigma") {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<std::size_t> dim(2, 64);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = dim(rng);
        const auto eta = random_etas(rng, n);
        const auto v = testing::random_spectrum(rng, n);
        std::vector<double> sigma(n);
        for (std::size_t i = 0; i < n; ++i) sigma[i] = std::sqrt(v[i]);
        const auto g = case3_variance_gradient(GaussianModel::from_dimensionless(eta, Spectrum(v)));
        auto f = [&](const std::vector<double>& s) {
            std::vector<double> sq(s.size());
            for (std::size_t i = 0; i < s.size(); ++i) sq[i] = s[i] * s[i];
            return case3_variance_fixed_eta(eta, sq);
        };
        std::vector<double> fd(n);
        for (std::size_t i = 0; i < n; ++i) fd[i] = testing::richardson_difference(f, sigma, i, 1e-3 * sigma[i]);
        CAPTURE(t);
        CHECK(testing::vec_rel_err(g, fd) < 1e-6);
    }
}

TEST_CASE("numerical minimizer at zero means stops immediately") {
    const auto r = numerical_min_case3(DimensionlessMeans::zeros(4));
    CHECK(r.iterations == 0);
    for (double v : r.spectrum.values()) CHECK(std::fabs(v - 0.25) < 1e-15);
}

TEST_CASE("numerical minimizer recovers the 3:2 ratio") {
    const auto r = numerical_min_case3(DimensionlessMeans({0.0, 1.0}));
    CHECK(std::fabs(r.spectrum[0] / r.spectrum[1] - 1.5) < 1e-6);
}

TEST_CASE("numerical minimizer agrees with the closed form") {
    std::mt19937_64 rng(10);
    std::uniform_int_distribution<std::size_t> dim(1, 16);
    for (int t = 0; t < 20; ++t) {
        const auto eta = random_etas(rng, dim(rng));
        const auto r = numerical_min_case3(eta);
        const auto closed = project_to_gauge(eta, optimal_spectrum(eta).eigenvalues);
        CAPTURE(t);
        CHECK(max_gap(r.spectrum.values(), closed) < 1e-6);
    }
}

TEST_CASE("numerical minimizer reports non-convergence") {
    MinimizerOptions opts;
    opts.max_iterations = 1;
    try {
        numerical_min_case3(DimensionlessMeans({0.0, 3.0, -1.0, 0.5}), opts);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.last_iterate().size() == 4);
        CHECK(e.gradient_norm() > opts.tol);
    }
    CHECK_THROWS_AS(numerical_min_case3(DimensionlessMeans({})), std::invalid_argument);
}

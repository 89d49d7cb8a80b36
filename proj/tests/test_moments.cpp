#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "cosvar/moments.hpp"
#include "test_support.hpp"

using namespace cosvar;

TEST_CASE("cosine reference values") {
    const std::vector<double> a = {1, 0, 0}, b = {0, 1, 0}, c = {2, 0, 0}, d = {-3, 0, 0};
    CHECK(cosine(a, b) == 0.0);
    CHECK(cosine(a, c) == 1.0);
    CHECK(cosine(a, d) == -1.0);
    const std::vector<double> e = {1, 1}, f = {1, 0};
    CHECK(std::fabs(cosine(e, f) - 1.0 / std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("cosine stays inside [-1, 1]") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 200; ++t) {
        auto a = testing::random_normals(rng, 7);
        auto b = a;
        for (double& x : b) x *= 3.000000001;
        const double c = cosine(a, b);
        CHECK(c <= 1.0);
        CHECK(c >= -1.0);
    }
}

TEST_CASE("cosine rejects zero vectors and names the argument") {
    const std::vector<double> z = {0, 0}, u = {1, 0};
    try {
        cosine(z, u);
        FAIL("expected domain_error");
    } catch (const std::domain_error& e) {
        CHECK(std::string(e.what()).find("first") != std::string::npos);
    }
    try {
        cosine(u, z);
        FAIL("expected domain_error");
    } catch (const std::domain_error& e) {
        CHECK(std::string(e.what()).find("second") != std::string::npos);
    }
    const std::vector<double> three = {1, 0, 0};
    CHECK_THROWS(cosine(u, three));
}

TEST_CASE("cosine scale invariance") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> k(0.01, 100.0);
    for (int t = 0; t < 100; ++t) {
        auto a = testing::random_normals(rng, 9);
        auto b = testing::random_normals(rng, 9);
        const double base = cosine(a, b);
        // Powers of two scale exactly.
        auto a2 = a;
        for (double& x : a2) x *= 8.0;
        CHECK(cosine(a2, b) == base);
        const double s = k(rng);
        auto as = a;
        for (double& x : as) x *= s;
        CHECK(std::fabs(cosine(as, b) - base) < 1e-14);
    }
}

TEST_CASE("cosine orthogonal invariance") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 2 + t % 15;
        const Matrix q = testing::random_orthogonal(rng, n);
        auto a = testing::random_normals(rng, n);
        auto b = testing::random_normals(rng, n);
        CHECK(std::fabs(cosine(testing::mat_vec(q, a), testing::mat_vec(q, b)) - cosine(a, b)) < 1e-12);
    }
}

TEST_CASE("spectrum invariants") {
    CHECK_THROWS_AS(Spectrum({}), std::invalid_argument);
    CHECK_THROWS_AS(Spectrum({1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(Spectrum({1.0, -1.0}), std::invalid_argument);
    CHECK_THROWS_AS(Spectrum({1.0, std::nan("")}), std::invalid_argument);
    CHECK_THROWS_AS(Spectrum({1.0, INFINITY}), std::invalid_argument);
    CHECK_THROWS_AS(Spectrum({1.0, 1e-13}), std::invalid_argument);
    CHECK_NOTHROW(Spectrum({1.0, 2e-12}));
    CHECK(Spectrum::isotropic(4).size() == 4);
    CHECK(Spectrum({1, 2}).tiled(3).size() == 6);
    CHECK(Spectrum({1, 2}).scaled(2.0)[1] == 4.0);
}

TEST_CASE("dimensionless means round trip") {
    const Spectrum s({4.0, 9.0, 0.25});
    const DimensionlessMeans eta({1.0, -2.0, 0.5});
    const GaussianModel m = GaussianModel::from_dimensionless(eta, s);
    CHECK(m.means()[0] == 2.0);
    CHECK(m.means()[1] == -6.0);
    CHECK(m.means()[2] == 0.25);
    const auto back = m.dimensionless_means();
    for (std::size_t i = 0; i < 3; ++i) CHECK(back.etas[i] == eta.etas[i]);
    CHECK_THROWS_AS(GaussianModel({1.0}, s), std::invalid_argument);
}

TEST_CASE("case 1 moments") {
    for (std::size_t n : {1u, 2u, 10u, 1000u}) {
        const auto m = case1_moments(n);
        CHECK(m.mean == 0.0);
        CHECK(m.variance == 1.0 / static_cast<double>(n));
        CHECK(m.kind == MomentKind::Exact);
    }
    CHECK(case1_moments(1000).variance == 0.001);
    CHECK_THROWS_AS(case1_moments(0), std::domain_error);
}

TEST_CASE("case 1 density reference values") {
    CHECK(std::fabs(case1_density(0.0, 3) - 0.5) < 1e-15);
    CHECK(std::fabs(case1_density(0.7, 3) - 0.5) < 1e-15);
    CHECK(std::fabs(case1_density(0.0, 11) - 315.0 / 256.0) < 1e-14);
    // n = 5: (1 - x^2) / B(1/2, 2) = 3/4 (1 - x^2).
    CHECK(std::fabs(case1_density(0.5, 5) - 0.75 * 0.75) < 4e-15);
    CHECK(std::fabs(case1_density(0.0, 2) - 1.0 / std::numbers::pi) < 1e-15);
    CHECK(case1_density(0.3, 7) == case1_density(-0.3, 7));
}

TEST_CASE("case 1 density domain") {
    CHECK_THROWS_AS(case1_density(1.5, 5), std::domain_error);
    CHECK_THROWS_AS(case1_density(-1.01, 5), std::domain_error);
    CHECK_THROWS_AS(case1_density(0.0, 1), std::domain_error);
}

TEST_CASE("case 1 density normalizes and has variance 1/n") {
    // x = sin(theta) keeps the integrand bounded for n >= 3.
    for (std::size_t n : {3u, 4u, 5u, 10u, 37u, 100u, 1000u}) {
        auto mass = [n](double th) { return case1_density(std::sin(th), n) * std::cos(th); };
        auto second = [n](double th) {
            const double x = std::sin(th);
            return x * x * case1_density(x, n) * std::cos(th);
        };
        const double lo = -std::numbers::pi / 2, hi = -lo;
        CAPTURE(n);
        CHECK(std::fabs(testing::integrate(mass, lo, hi, 1e-13) - 1.0) < 1e-8);
        CHECK(testing::rel_err(testing::integrate(second, lo, hi, 1e-14), 1.0 / n) < 1e-7);
    }
}

TEST_CASE("case 1 density at n = 2 is the arcsine law") {
    // Under x = sin(theta) the arcsine density becomes the constant 1/pi.
    for (double th : {-1.5, -0.7, 0.0, 0.2, 1.1, 1.55}) {
        CHECK(std::fabs(case1_density(std::sin(th), 2) * std::cos(th) - 1.0 / std::numbers::pi) < 1e-12);
    }
}

TEST_CASE("case 2 variance reference values") {
    CHECK(case2_variance(Spectrum::isotropic(100)).variance == 0.01);
    CHECK(case2_variance(Spectrum({1, 1, 1, 1})).variance == 0.25);
    CHECK(std::fabs(case2_variance(Spectrum({2, 1, 1})).variance - 6.0 / 16.0) < 1e-16);
    CHECK(case2_variance(Spectrum({3.0})).variance == 1.0);
    CHECK(case2_variance(Spectrum({1, 1})).mean == 0.0);
    CHECK(case2_variance(Spectrum({1, 2})).kind == MomentKind::AsymptoticApprox);
}

TEST_CASE("case 2 variance is scale invariant") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> k(1e-3, 1e3);
    for (int t = 0; t < 100; ++t) {
        const Spectrum s(testing::random_spectrum(rng, 1 + t % 40));
        const double base = case2_variance(s).variance;
        CHECK(case2_variance(s.scaled(4.0)).variance == base);
        CHECK(testing::rel_err(case2_variance(s.scaled(k(rng))).variance, base) < 1e-14);
    }
}

TEST_CASE("case 2 variance lies between 1/n and 1") {
    std::mt19937_64 rng(22);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 1 + t % 30;
        const double v = case2_variance(Spectrum(testing::random_spectrum(rng, n))).variance;
        CHECK(v >= (1.0 / n) * (1 - 1e-15));
        CHECK(v <= 1.0 + 1e-15);
    }
}

TEST_CASE("case 3 reference values") {
    const auto m = case3_moments(GaussianModel(std::vector<double>(100, 1.0), Spectrum::isotropic(100)));
    CHECK(std::fabs(m.mean - 0.5) < 1e-15);
    CHECK(std::fabs(m.variance - 0.0075) < 1e-16);
    CHECK(m.kind == MomentKind::AsymptoticApprox);
}

TEST_CASE("case 3 with zero means equals case 2 bit for bit") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 100; ++t) {
        const Spectrum s(testing::random_spectrum(rng, 1 + t % 64));
        const auto c3 = case3_moments(GaussianModel::centered(s));
        CHECK(c3.mean == 0.0);
        CHECK(c3.variance == case2_variance(s).variance);
    }
}

TEST_CASE("case 2 gradient reference values") {
    const auto g = case2_variance_gradient(Spectrum::isotropic(4));
    for (double x : g) CHECK(std::fabs(x) < 1e-17);
    // v = [2, 1]: S = 3, Q = 5, g = 2 (3 v - 5) / 27.
    const auto h = case2_variance_gradient(Spectrum({2, 1}));
    CHECK(std::fabs(h[0] - 2.0 / 27.0) < 1e-16);
    CHECK(std::fabs(h[1] + 4.0 / 27.0) < 1e-16);
}

TEST_CASE("case 2 gradient matches finite differences") {
    std::mt19937_64 rng(41);
    std::uniform_int_distribution<std::size_t> dim(2, 64);
    for (int t = 0; t < 100; ++t) {
        const auto v = testing::random_spectrum(rng, dim(rng));
        const auto g = case2_variance_gradient(Spectrum(v));
        auto f = [](const std::vector<double>& x) {
            double s = 0, q = 0;
            for (double y : x) {
                s += y;
                q += y * y;
            }
            return q / (s * s);
        };
        std::vector<double> fd(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) fd[i] = testing::richardson_difference(f, v, i, 1e-3 * v[i]);
        CHECK(testing::vec_rel_err(g, fd) < 1e-6);
    }
}

TEST_CASE("norm moments reference values") {
    const auto iso = norm_moments(GaussianModel::centered(Spectrum::isotropic(100)));
    CHECK(iso.mean_sq == 100.0);
    CHECK(iso.var_sq == 200.0);
    CHECK(iso.jensen_upper_bound_mean == 10.0);
    const auto m = norm_moments(GaussianModel({1.0, 2.0}, Spectrum({1.0, 4.0})));
    CHECK(m.mean_sq == 10.0);
    // 2 sum v^2 + 4 sum mu^2 v = 2 * 17 + 4 * 17.
    CHECK(m.var_sq == 102.0);
}

TEST_CASE("norm concentration ratio") {
    CHECK(std::fabs(norm_concentration_ratio(GaussianModel::centered(Spectrum::isotropic(50))) - 0.2) < 1e-15);
    std::mt19937_64 rng(51);
    for (int t = 0; t < 20; ++t) {
        const Spectrum s(testing::random_spectrum(rng, 5 + t));
        const auto mu = testing::random_normals(rng, s.size());
        const double base = norm_concentration_ratio(GaussianModel(mu, s));
        double prev = base;
        for (std::size_t r : {2u, 4u, 16u}) {
            std::vector<double> mu_r;
            for (std::size_t k = 0; k < r; ++k) mu_r.insert(mu_r.end(), mu.begin(), mu.end());
            const double tiled = norm_concentration_ratio(GaussianModel(mu_r, s.tiled(r)));
            CHECK(testing::rel_err(tiled, base / std::sqrt(double(r))) < 1e-12);
            CHECK(tiled < prev);
            prev = tiled;
        }
    }
}

TEST_CASE("characteristic function reference values") {
    CHECK(char_product_normal(0.0, 1.0, 2.0, -1.0, 3.0) == std::complex<double>(1.0, 0.0));
    CHECK(std::abs(char_product_normal(1.0, 0.0, 1.0, 0.0, 1.0) - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(char_square_normal(0.0, 0.3, 2.0) == std::complex<double>(1.0, 0.0));
    for (double t : {-2.0, -0.3, 0.1, 1.7}) {
        const auto want = std::pow(std::complex<double>(1.0, -2.0 * t), -0.5);
        CHECK(std::abs(char_square_normal(t, 0.0, 1.0) - want) < 1e-15);
    }
}

TEST_CASE("moments recovered from characteristic functions") {
    const auto sq = moments_from_cf([](double t) { return char_square_normal(t, 1.0, 1.0); }, cf_step(1.0));
    CHECK(std::fabs(sq.first - 2.0) < 1e-6);
    CHECK(std::fabs(sq.second - 10.0) < 1e-5);
    const auto prod = moments_from_cf([](double t) { return char_product_normal(t, 1.0, 1.0, 1.0, 2.0); }, cf_step(2.0));
    // Var(XY) = s1 s2 + m1^2 s2 + m2^2 s1 = 2 + 2 + 1.
    CHECK(std::fabs(prod.variance() - 5.0) < 1e-4);
}

TEST_CASE("characteristic-function oracle agrees with the closed-form sums") {
    // Var(sum X_i Y_i) with X, Y i.i.d. per axis is sum s^2 (s^2 + 2 mu^2),
    // the case-3 numerator; E sum X_i^2 is its denominator.
    std::mt19937_64 rng(61);
    std::uniform_int_distribution<std::size_t> dim(1, 8);
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = dim(rng);
        const auto v = testing::random_spectrum(rng, n);
        const auto mu = testing::random_normals(rng, n);
        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) scale = std::max({scale, v[i], mu[i] * mu[i]});
        const double h = cf_step(scale);
        auto dot_cf = [&](double s) {
            std::complex<double> p = 1.0;
            for (std::size_t i = 0; i < n; ++i) p *= char_product_normal(s, mu[i], v[i], mu[i], v[i]);
            return p;
        };
        auto norm_cf = [&](double s) {
            std::complex<double> p = 1.0;
            for (std::size_t i = 0; i < n; ++i) p *= char_square_normal(s, mu[i], v[i]);
            return p;
        };
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            num += v[i] * (v[i] + 2.0 * mu[i] * mu[i]);
            den += mu[i] * mu[i] + v[i];
        }
        CAPTURE(t);
        CHECK(testing::rel_err(moments_from_cf(dot_cf, h).variance(), num) < 1e-4);
        CHECK(testing::rel_err(moments_from_cf(norm_cf, h).first, den) < 1e-4);
    }
}

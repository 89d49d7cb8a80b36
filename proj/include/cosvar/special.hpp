#pragma once

#include <cmath>
#include <span>

namespace cosvar {

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    CompensatedSum& operator+=(double x) noexcept {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
        return *this;
    }
    void merge(const CompensatedSum& other) noexcept {
        *this += other.sum_;
        *this += other.comp_;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double compensated_sum(std::span<const double> xs) noexcept;

/// ln Gamma(x) for x > 0 (Lanczos, g = 7).
double log_gamma(double x);

/// ln B(a, b). Throws std::domain_error for nonpositive arguments.
///
/// Both arguments small: direct Lanczos log-gamma. Otherwise the Stirling
/// expansion is differenced analytically so the large ln Gamma terms cancel
/// before rounding, which keeps B(1/2, (n-1)/2) accurate for n up to 1e6.
double log_beta(double a, double b);

/// Standard normal CDF.
double normal_cdf(double x) noexcept;

/// Standard normal inverse CDF, absolute error below 1e-12 on (0, 1).
/// Throws std::domain_error outside the open interval.
double normal_quantile(double p);

}  // namespace cosvar

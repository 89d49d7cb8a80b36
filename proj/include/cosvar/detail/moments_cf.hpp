#pragma once

#include <complex>

namespace cosvar {

// phi'(0) = i E[X], phi''(0) = -E[X^2].
template <typename Cf>
RawMoments moments_from_cf(Cf&& phi, double step) {
    const std::complex<double> at_zero = phi(0.0);
    auto first_diff = [&](double h) { return (phi(h) - phi(-h)).imag() / (2.0 * h); };
    auto second_diff = [&](double h) { return -(phi(h) - 2.0 * at_zero + phi(-h)).real() / (h * h); };

    const double h = step;
    RawMoments out;
    out.first = (4.0 * first_diff(h / 2.0) - first_diff(h)) / 3.0;
    out.second = (4.0 * second_diff(h / 2.0) - second_diff(h)) / 3.0;
    return out;
}

}  // namespace cosvar

#include "cosvar/rng.hpp"

#include <cmath>
#include <stdexcept>

#include "cosvar/special.hpp"

namespace cosvar {

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t state = seed;
    std::uint64_t h = splitmix64(state);
    for (std::uint64_t key : path) {
        state = h ^ (key + 0x632be59bd9b4e019ULL);
        h = splitmix64(state);
    }
    return h;
}

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
}

}  // namespace

Stream::Stream(std::uint64_t seed) noexcept {
    std::uint64_t state = seed;
    for (auto& s : s_) s = splitmix64(state);
}

std::uint64_t Stream::next() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Stream::uniform() noexcept {
    // 53 random bits centred in their cell: never 0 or 1.
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

double Stream::normal() {
    return normal_quantile(uniform());
}

double Stream::gamma(double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0)) throw std::domain_error("Stream::gamma: shape and rate must be positive");
    if (shape < 1.0) {
        // Gamma(k) = Gamma(k + 1) * U^(1/k); done in log space so tiny shapes do not
        // flush to zero before the caller can see it.
        const double boosted = gamma(shape + 1.0, 1.0);
        const double log_x = std::log(boosted) + std::log(uniform()) / shape;
        return std::exp(log_x) / rate;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return d * v / rate;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
}

}  // namespace cosvar

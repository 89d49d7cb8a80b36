#pragma once

#include <cstdint>
#include <initializer_list>

namespace cosvar {

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Hash a root seed and a path of stream indices into an independent seed.
/// Streams keyed by (seed, task, ...) never depend on scheduling order.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept;

/// xoshiro256** stream seeded through splitmix64.
class Stream {
public:
    explicit Stream(std::uint64_t seed) noexcept;
    Stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept : Stream(derive_seed(seed, path)) {}

    std::uint64_t next() noexcept;
    /// Uniform on the open interval (0, 1).
    double uniform() noexcept;
    /// Standard normal by inversion.
    double normal();
    /// Gamma(shape, rate): Marsaglia-Tsang for shape >= 1, shape-boost below.
    double gamma(double shape, double rate);

private:
    std::uint64_t s_[4];
};

}  // namespace cosvar

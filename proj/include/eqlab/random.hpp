#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace eqlab {

/// splitmix64 finalizer. Used to derive independent, individually reproducible streams.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of the stream for (sweep point, trial) under a master seed:
///   mix64(mix64(mix64(master) ^ sweep) ^ trial)
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t sweep,
                                    std::uint64_t trial) noexcept {
    return mix64(mix64(mix64(master) ^ sweep) ^ trial);
}

/// Seeded random stream. Not thread-safe; give each worker its own.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return uniform_(engine_); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform_(engine_); }
    double normal() { return normal_(engine_); }

    /// Standard complex Gaussian, E|z|^2 = 1.
    std::complex<double> complex_normal() {
        constexpr double s = 0.70710678118654752440;
        const double re = normal_(engine_);
        const double im = normal_(engine_);
        return {s * re, s * im};
    }

    double phase() { return 2.0 * std::numbers::pi * uniform_(engine_); }

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace eqlab

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace spatial_sir {

/// Independent random substreams of one replication.
enum class Subsystem : std::uint64_t {
    placement = 1,
    outbreak = 2,
    movement = 3,
    transmission = 4,
    recovery = 5,
    risk = 6,
    lockdown = 7,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic generator with portable (library-independent) draws.
class Rng {
public:
    Rng(std::uint64_t seed, Subsystem sub, std::uint64_t salt = 0)
        : engine_(splitmix64(splitmix64(seed ^ splitmix64(salt)) + static_cast<std::uint64_t>(sub))) {}

    explicit Rng(std::uint64_t raw_seed) : engine_(splitmix64(raw_seed)) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer on [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Rejection removes modulo bias.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    /// Standard normal via Box-Muller (one value per call).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace spatial_sir

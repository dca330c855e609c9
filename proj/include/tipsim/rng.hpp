#pragma once

#include <cstdint>
#include <random>

namespace tipsim {

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of replication `index`: splitmix64(seed + 0x9E3779B97F4A7C15 * (index + 1)).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Reproducible random source. The engine is std::mt19937_64; the
/// distributions are implemented here so that draws do not depend on the
/// standard library vendor.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double exponential(double rate);

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

}  // namespace tipsim

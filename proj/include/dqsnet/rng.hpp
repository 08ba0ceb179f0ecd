#pragma once

#include <cstdint>
#include <random>

namespace dqsnet {

// Deterministic uniform sampling. std::uniform_real_distribution is
// implementation-defined, so draws go through an explicit 53-bit conversion;
// the mt19937_64 stream itself is pinned by the standard.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Independent stream derived from (seed, stream) via splitmix64.
    Rng(std::uint64_t seed, std::uint64_t stream)
        : engine_(mix(seed ^ mix(stream + 0x9E3779B97F4A7C15ULL))) {}

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t bits() { return engine_(); }

    // Index in [0, n).
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::mt19937_64 engine_;
};

}  // namespace dqsnet

#pragma once

#include <cstdint>
#include <random>

namespace ran {

// Portable sampler on top of std::mt19937_64.
//
// The engine's output sequence is fixed by the standard, but the standard
// distributions are not, so uniform and normal variates are derived here:
// uniform takes the top 53 bits, normal uses Box-Muller (cosine branch only,
// one normal per pair of uniforms). Same seed gives the same stream on every
// conforming platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal(double mean, double sd);

private:
    std::mt19937_64 engine_;
};

}  // namespace ran

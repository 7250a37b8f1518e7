#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace triage {

// All stochastic code in the toolkit draws from mt19937_64 streams derived
// from a single root seed by a counter scheme: stream k is seeded with
// splitmix64 applied to root + k golden-ratio increments.  Serial and
// parallel runs therefore see identical streams for the same (root, k).
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::mt19937_64 make_stream(std::uint64_t root_seed, std::uint64_t stream) {
    std::uint64_t s = root_seed + 0x9E3779B97F4A7C15ULL * stream;
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return std::mt19937_64(seq);
}

// Uniform on (0,1); 53-bit mantissa taken directly from the generator so the
// value does not depend on the standard library's distribution internals.
inline double uniform01(std::mt19937_64& rng) {
    double u;
    do {
        u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    } while (u <= 0.0);
    return u;
}

inline bool bernoulli(std::mt19937_64& rng, double p) { return uniform01(rng) < p; }

// Marsaglia polar method; one value per call, the pair partner is discarded
// to keep the draw sequence independent of call sites.
inline double standard_normal(std::mt19937_64& rng) {
    for (;;) {
        double v1 = 2.0 * uniform01(rng) - 1.0;
        double v2 = 2.0 * uniform01(rng) - 1.0;
        double s = v1 * v1 + v2 * v2;
        if (s > 0.0 && s < 1.0) return v1 * std::sqrt(-2.0 * std::log(s) / s);
    }
}

// Marsaglia-Tsang squeeze sampler.  Valid for all shape > 0; the shape < 1
// case uses the boost Gamma(shape+1) * U^(1/shape).
inline double gamma_sample(std::mt19937_64& rng, double shape, double scale) {
    if (shape < 1.0) {
        double u = uniform01(rng);
        return gamma_sample(rng, shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = standard_normal(rng);
        double t = 1.0 + c * x;
        if (t <= 0.0) continue;
        double v = t * t * t;
        double u = uniform01(rng);
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v * scale;
    }
}

}  // namespace triage

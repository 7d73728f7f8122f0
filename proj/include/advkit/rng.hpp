#pragma once

#include <cstdint>
#include <random>

namespace advkit {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent seeds from a master seed
// plus stream tags so per-item randomness is stable under parallel schedules.
inline std::uint64_t mix_seed(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    return mix_seed(seed ^ mix_seed(tag));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag_a, std::uint64_t tag_b) {
    return derive_seed(derive_seed(seed, tag_a), tag_b);
}

inline float uniform(Rng& rng, float lo, float hi) {
    std::uniform_real_distribution<float> d(lo, hi);
    return d(rng);
}

inline float gaussian(Rng& rng, float mean, float stddev) {
    // Box-Muller, one draw per call: keeps the stream layout independent of
    // the standard library's normal_distribution internals.
    std::uniform_real_distribution<double> d(0.0, 1.0);
    double u1 = 0.0;
    do {
        u1 = d(rng);
    } while (u1 <= 1e-300);
    const double u2 = d(rng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * static_cast<float>(r * std::cos(6.283185307179586 * u2));
}

inline int uniform_int(Rng& rng, int lo, int hi) {  // inclusive bounds
    std::uniform_int_distribution<int> d(lo, hi);
    return d(rng);
}

}  // namespace advkit

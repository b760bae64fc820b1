#pragma once

#include <cstdint>
#include <random>

namespace mspde {

/// SplitMix64 step; used to derive independent per-path stream seeds from
/// (master seed, path index) so Monte Carlo results do not depend on the
/// order or number of worker threads.
inline uint64_t splitmix64(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t derive_seed(uint64_t master, uint64_t index) {
    uint64_t s = master ^ (0x632be59bd9b4e019ULL * (index + 1));
    uint64_t a = splitmix64(s);
    uint64_t b = splitmix64(s);
    return a ^ (b << 1);
}

using Rng = std::mt19937_64;

inline Rng make_rng(uint64_t master, uint64_t index) { return Rng(derive_seed(master, index)); }

inline double draw_normal(Rng& rng, double stddev) {
    std::normal_distribution<double> dist(0.0, stddev);
    return dist(rng);
}

inline double draw_uniform(Rng& rng, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    return dist(rng);
}

} // namespace mspde

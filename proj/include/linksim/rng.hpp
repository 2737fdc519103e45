#pragma once

#include <cstdint>
#include <random>

namespace linksim::rng {

// splitmix64; used to derive stream seeds from (master_seed, tags) so
// every noise source gets an independent, reproducible stream.
inline uint64_t mix(uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t derive(uint64_t master, uint64_t a, uint64_t b = 0, uint64_t c = 0)
{
    return mix(mix(mix(master ^ 0x6c62272e07bb0142ULL) ^ a) ^ mix(b ^ mix(c)));
}

inline std::mt19937_64 engine(uint64_t seed)
{
    return std::mt19937_64(seed);
}

}  // namespace linksim::rng

#pragma once

#include <cstdint>

namespace resipi {

// Counter-based PRNG: every draw is a pure function of (seed, cycle, node,
// stream index), so injection sequences are reproducible independent of
// call order. Mixer is splitmix64.
inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t draw_u64(uint64_t seed, uint64_t cycle, uint64_t node, uint64_t stream) {
    uint64_t h = mix64(seed ^ 0x632be59bd9b4e019ULL);
    h = mix64(h ^ cycle * 0xff51afd7ed558ccdULL);
    h = mix64(h ^ node * 0xc4ceb9fe1a85ec53ULL);
    h = mix64(h ^ stream);
    return h;
}

// Uniform in [0, 1).
inline double draw_unit(uint64_t seed, uint64_t cycle, uint64_t node, uint64_t stream) {
    return static_cast<double>(draw_u64(seed, cycle, node, stream) >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n).
inline uint64_t draw_below(uint64_t seed, uint64_t cycle, uint64_t node, uint64_t stream, uint64_t n) {
    return draw_u64(seed, cycle, node, stream) % n;
}

}  // namespace resipi

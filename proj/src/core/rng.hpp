#pragma once

#include <cstdint>

namespace degreescope {

// Deterministic 64-bit generator used by every resampling operation:
// xoshiro256** with its state filled from a SplitMix64 stream, as published
// by Blackman & Vigna. Pinned here so that seeded results are bit-identical
// across platforms and runs; the seed schedule everywhere is base + iteration
// index, one generator per iteration.
class Xoshiro256ss {
public:
    explicit Xoshiro256ss(uint64_t seed) {
        uint64_t x = seed;
        for (auto& w : state_) w = splitmix64(x);
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }

    uint64_t next() {
        const uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Index in [0, n) via 128-bit multiply-shift: floor(next() * n / 2^64).
    uint64_t bounded(uint64_t n) {
        return static_cast<uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    static uint64_t splitmix64(uint64_t& x) {
        uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    static uint64_t rotl(uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    uint64_t state_[4];
};

// Human-readable generator identification for output provenance.
inline const char* rng_provenance() {
    return "xoshiro256** seeded via splitmix64; index draw = floor(u64*n/2^64)";
}

} // namespace degreescope

#pragma once

#include <cstdint>

namespace neighperc {

// All randomness in the project flows through this header. Every draw is a
// pure function of (master seed, structured indices), so results replay
// bit-exactly across platforms and thread counts. The mixing function is the
// SplitMix64 finalizer.

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

inline std::uint64_t avalanche64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Seed of the `index`-th substream of `seed`. Chaining derive() calls builds
// the documented hierarchy: master -> trial -> vertex/edge.
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
    return avalanche64(seed + kGoldenGamma * (index + 1));
}

// Stream labels keep unrelated substream families from colliding when they
// hang off the same master seed.
enum Stream : std::uint64_t {
    kStreamTrial = 0x01,
    kStreamVertex = 0x02,
    kStreamEdge = 0x03,
    kStreamProbe = 0x04,
    kStreamDiagonal = 0x05,
};

inline std::uint64_t derive(std::uint64_t seed, Stream label, std::uint64_t index) {
    return derive(derive(seed, static_cast<std::uint64_t>(label)), index);
}

struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t s = 0) : state(s) {}

    std::uint64_t next() {
        std::uint64_t z = (state += kGoldenGamma);
        return avalanche64(z);
    }

    // Uniform in [0,1) with 53 random bits.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0,n) via fixed-point multiply; bias is O(n/2^64).
    std::uint32_t below(std::uint32_t n) {
        return static_cast<std::uint32_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }
};

}  // namespace neighperc

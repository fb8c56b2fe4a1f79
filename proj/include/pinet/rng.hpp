#pragma once

#include <cstdint>

namespace pinet {

/// SplitMix64 (Steele, Lea & Flood), used as the project-wide pseudorandom
/// source. It is a pure 64-bit counter-based mixer: output i is
/// mix(seed + (i+1)*GAMMA), so a stream is a function of (seed, index)
/// alone and identical on every platform. Sub-streams for independent
/// concerns are derived by mixing a stream id into the seed.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) from the top 53 bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller on two fresh uniforms (no caching, so
    /// the draw count per call is fixed).
    double normal();

    /// Uniform integer in [0, n) by rejection-free scaling (n << 2^64 here,
    /// the modulo bias is irrelevant for shuffling desk-scale datasets).
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

    /// Deterministic derived stream for a named sub-concern.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream_id);

private:
    std::uint64_t state_;
};

}  // namespace pinet

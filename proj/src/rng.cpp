#include "pinet/rng.hpp"

#include <cmath>
#include <numbers>

namespace pinet {

double SplitMix64::normal() {
    // Box-Muller; u1 is kept away from 0 so the log is finite.
    double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t SplitMix64::derive(std::uint64_t seed, std::uint64_t stream_id) {
    SplitMix64 g(seed ^ (0xA5A5A5A55A5A5A5AULL + stream_id * 0x9E3779B97F4A7C15ULL));
    return g.next_u64();
}

}  // namespace pinet

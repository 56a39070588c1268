#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace eulerlab {

/// Counter-based generator "splitmix64-counter v1".
///
///   mix(z)  = splitmix64 finalizer (xor-shift 30/27/31 with the standard multipliers)
///   key     = mix(seed + PHI * (stream + 1))
///   draw(c) = mix(key + PHI * (c + 1)),  PHI = 0x9e3779b97f4a7c15, arithmetic mod 2^64
///   uniform = (draw >> 11) * 2^-53 in [0, 1)
///   normal  = sqrt(-2 ln(1 - u1)) * cos(2 pi u2) from two consecutive uniforms
///
/// Any (seed, stream, counter) triple maps to a fixed value, so streams can be split
/// freely and reproduced in other languages.
class CounterRng {
public:
    static constexpr std::uint64_t kPhi = 0x9e3779b97f4a7c15ULL;
    static constexpr const char* kName = "splitmix64-counter";
    static constexpr int kVersion = 1;

    CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(mix(seed + kPhi * (stream + 1))) {}

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next() noexcept { return mix(key_ + kPhi * (++counter_)); }
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    double normal() noexcept {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace eulerlab

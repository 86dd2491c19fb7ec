#pragma once

#include <cstdint>

#include "rejopt/math.hpp"

namespace rejopt {

// Generator scheme "rejopt-splitmix64-v1".
//
// A SplitMix64 stream per logical draw index: the per-sample substream i is
// seeded with mix(seed) + (i+1)*GAMMA, so sample i is a pure function of
// (seed, i) and sequences may be generated out of order or in parallel with
// bit-identical results.
class SplitRng {
public:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    explicit SplitRng(std::uint64_t state) : state_(state) {}

    /// Substream for draw index `index` under master `seed`.
    static SplitRng substream(std::uint64_t seed, std::uint64_t index) {
        return SplitRng(mix(seed) + (index + 1) * kGamma);
    }

    std::uint64_t next_u64() {
        state_ += kGamma;
        return mix(state_);
    }

    /// Uniform double in [0,1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0,1), safe as a CDF argument.
    double next_open_unit() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal draw via the inverse CDF (one uniform per draw).
    double next_normal() { return inv_norm_cdf(next_open_unit()); }

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

private:
    std::uint64_t state_;
};

}  // namespace rejopt

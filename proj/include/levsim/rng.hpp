#pragma once

#include <cstdint>

namespace levsim {

// Deterministic random number generation for the simulator.
//
// All randomness in the project flows through SplitMix64 so that results are
// bit-reproducible across platforms, compilers and thread counts, and so the
// sequences can be regenerated in another language from this description:
//
//   state := seed
//   next(): state += 0x9E3779B97F4A7C15;  return mix64(state)
//   mix64(z): z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//             z ^= z >> 27; z *= 0x94D049BB133111EB;
//             z ^= z >> 31; return z
//
// Derived quantities (std::uniform_*_distribution is implementation-defined,
// so we do not use it):
//   uniform double in [0,1):  (next() >> 11) * 2^-53
//   uniform integer in [0,n): high 64 bits of the 128-bit product next() * n
//
// Independent substreams are keyed by (seed, domain, index):
//   state0 = mix64( mix64(seed ^ GAMMA*(domain+1)) ^ GAMMA*(index+1) )
// where GAMMA = 0x9E3779B97F4A7C15. Work item i always uses substream i, so
// Monte-Carlo output is independent of how items are assigned to workers.

inline constexpr std::uint64_t kRngGamma = 0x9E3779B97F4A7C15ULL;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Substream domains; keep values stable, they are part of the output contract.
enum class RngDomain : std::uint64_t {
    realization = 0,  // one stream per Monte-Carlo realization
    bootstrap = 1,    // one stream per bootstrapped metric
    fixture = 2,      // synthetic sample-data generation
};

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}

    static SplitMix64 substream(std::uint64_t seed, RngDomain domain, std::uint64_t index) {
        std::uint64_t s = mix64(seed ^ kRngGamma * (static_cast<std::uint64_t>(domain) + 1));
        return SplitMix64(mix64(s ^ kRngGamma * (index + 1)));
    }

    std::uint64_t next() {
        state_ += kRngGamma;
        return mix64(state_);
    }

    // Uniform in [0,1) with 53 bits of precision.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in [0,n), n > 0, via Lemire's multiply-shift reduction.
    std::uint64_t next_below(std::uint64_t n) {
        unsigned __int128 prod = static_cast<unsigned __int128>(next()) * n;
        return static_cast<std::uint64_t>(prod >> 64);
    }

private:
    std::uint64_t state_;
};

}  // namespace levsim

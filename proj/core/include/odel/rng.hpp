#pragma once

#include <cmath>
#include <cstdint>

namespace odel {

/// Seed for one reproducible random stream. Identical (seed, stream_id)
/// pairs reproduce identical output sequences bit for bit.
struct RngSeed {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

inline std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// xoshiro256++ generator, seeded from (seed, stream_id) via splitmix64.
/// Satisfies UniformRandomBitGenerator.
class Rng {
public:
    using result_type = std::uint64_t;

    Rng() : Rng(RngSeed{}) {}
    explicit Rng(RngSeed s) {
        std::uint64_t x = s.seed;
        std::uint64_t y = splitmix64(x) ^ s.stream_id;
        // Mix the stream id through the whole state, not just one word.
        std::uint64_t m = y;
        for (auto& w : state_) w = splitmix64(m);
        // A zero state would be absorbing; splitmix output is never all-zero
        // across four consecutive draws for practical purposes, but guard anyway.
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type(0); }

    result_type operator()() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) {
        // Debiased modulo; the loop almost never iterates for small n.
        const std::uint64_t limit = max() - max() % n;
        std::uint64_t x;
        do {
            x = (*this)();
        } while (x >= limit);
        return x % n;
    }

    /// Standard normal via the Marsaglia polar method (one value cached).
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        cached_ = v * f;
        has_cached_ = true;
        return u * f;
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4] = {};
    double cached_ = 0.0;
    bool has_cached_ = false;
};

/// Derive a child stream deterministically, e.g. one stream per tree node
/// or per experiment purpose, from a run-level base seed.
inline RngSeed substream(RngSeed base, std::uint64_t child_id) {
    std::uint64_t x = base.stream_id ^ (0xa0761d6478bd642fULL + child_id);
    return RngSeed{base.seed, splitmix64(x)};
}

} // namespace odel

#ifndef ADR_RNG_HPP
#define ADR_RNG_HPP

#include <cmath>
#include <cstdint>
#include <string_view>

namespace adr {

// Deterministic random utilities. The standard <random> distributions are
// implementation-defined, so everything that must replay bit-identically
// across toolchains is derived from raw 64-bit draws here.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// xoshiro256** stream seeded via splitmix64.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) {
            x = splitmix64(x);
            word = x;
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [lo, hi] inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(next_u64() % span);
    }

    bool bernoulli(double p) { return next_double() < p; }

    /// Trials until the first success of a Bernoulli(p), i.e. the gap
    /// between consecutive hits of independent daily draws. p in (0, 1].
    std::int64_t geometric_gap(double p) {
        if (p >= 1.0) return 1;
        const double u = next_double();
        return 1 + static_cast<std::int64_t>(std::floor(std::log1p(-u) / std::log1p(-p)));
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

/// One keyed draw in [0, max_offset], independent of patient iteration
/// order: the value depends only on (seed, key, max_offset).
inline std::int64_t keyed_uniform(std::uint64_t seed, std::string_view key,
                                  std::int64_t max_offset) {
    if (max_offset <= 0) return 0;
    const std::uint64_t mixed = splitmix64(seed ^ fnv1a64(key));
    return static_cast<std::int64_t>(mixed % static_cast<std::uint64_t>(max_offset + 1));
}

}  // namespace adr

#endif

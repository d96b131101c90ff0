#pragma once

#include <cstdint>
#include <vector>

namespace c2p {

// One splitmix64 mixing step (Vigna's fixed-increment variant of the
// SplittableRandom finalizer). Used to derive independent stream seeds:
// stream i of master seed m is splitmix64(m ^ i).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Minimal PCG32 (XSH-RR 64/32, single sequence). All randomized behavior
// in the library draws from this generator so results are bit-reproducible
// across platforms and thread counts.
class Pcg32 {
public:
    explicit Pcg32(std::uint64_t seed, std::uint64_t stream = kDefaultStream) {
        state_ = 0;
        inc_ = (stream << 1u) | 1u;
        next_u32();
        state_ += seed;
        next_u32();
    }

    std::uint32_t next_u32() {
        std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        std::uint32_t xorshifted =
            static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    // Unbiased draw in [0, bound) via threshold rejection.
    std::uint32_t next_below(std::uint32_t bound) {
        std::uint32_t threshold = (0u - bound) % bound;
        for (;;) {
            std::uint32_t r = next_u32();
            if (r >= threshold) return r % bound;
        }
    }

    std::uint64_t next_u64() {
        std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    // Uniform in [0, 1) with 32-bit resolution.
    double next_double() { return next_u32() * (1.0 / 4294967296.0); }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    bool next_bool() { return (next_u32() & 1u) != 0; }

    // Deterministic Fisher-Yates permutation of {0, ..., n-1}.
    std::vector<std::size_t> permutation(std::size_t n) {
        std::vector<std::size_t> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = i;
        for (std::size_t i = n; i > 1; --i) {
            std::size_t j = next_below(static_cast<std::uint32_t>(i));
            std::swap(p[i - 1], p[j]);
        }
        return p;
    }

private:
    static constexpr std::uint64_t kDefaultStream = 0xDA3E39CB94B95BDBULL;

    std::uint64_t state_;
    std::uint64_t inc_;
};

// Per-item generator for embarrassingly parallel work: results do not
// depend on scheduling because each index derives its own stream.
inline Pcg32 stream_rng(std::uint64_t master_seed, std::uint64_t index) {
    return Pcg32(splitmix64(master_seed ^ index));
}

}  // namespace c2p

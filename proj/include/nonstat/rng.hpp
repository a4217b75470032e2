#pragma once

#include <cstdint>

namespace nonstat {

// Counter-based randomness: every draw is a pure function of (seed, index,
// substream), so evaluation order and thread count never matter and two-sided
// index sequences (n in Z) come for free.

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    return mix64(a ^ (mix64(b) + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

// Uniform double in [0, 1) from the top 53 bits.
inline double bits_to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

struct OmegaStream {
    std::uint64_t master_seed = 0;
    std::int64_t index_origin = 0;  // supports two-sided sequences

    std::uint64_t raw(std::int64_t n, std::uint32_t substream = 0) const {
        std::uint64_t h = hash_combine(master_seed, static_cast<std::uint64_t>(n - index_origin));
        return mix64(h ^ (static_cast<std::uint64_t>(substream) << 32));
    }

    double uniform(std::int64_t n, std::uint32_t substream = 0) const {
        return bits_to_unit(raw(n, substream));
    }
};

// Derives an independent stream for Monte Carlo sample s of a block.
inline OmegaStream sample_stream(std::uint64_t seed_block, std::uint64_t sample) {
    return OmegaStream{hash_combine(hash_combine(seed_block, 0x5bd1e995u), sample), 0};
}

}  // namespace nonstat

#pragma once

#include <cstdint>
#include <random>

namespace svar {

/// Independent stream for (seed, index, attempt). Streams do not depend on the order in
/// which they are created, which keeps parallel bootstraps reproducible.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index, std::uint64_t attempt = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      static_cast<std::uint32_t>(attempt), 0x5eedu};
    return std::mt19937_64(seq);
}

/// Uniform integer in [0, n). Rejection sampling, so the result is exact and
/// independent of the standard library's distribution implementations.
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (true) {
        const std::uint64_t r = rng();
        if (r >= threshold) return r % n;
    }
}

/// +1 or -1 with equal probability.
inline double rademacher(std::mt19937_64& rng) { return (rng() >> 63) ? 1.0 : -1.0; }

}  // namespace svar

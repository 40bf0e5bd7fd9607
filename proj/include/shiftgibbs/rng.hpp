#pragma once

#include <cstdint>

namespace shiftgibbs {

// SplitMix64. Used both as the per-stream generator and, through mix64,
// as the hash that derives independent sub-streams from (seed, generation,
// particle index). Counter-based streams make every particle's draw
// sequence independent of thread scheduling.
inline std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next()
    {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform in (0, 1); safe to feed into quantile functions
    double next_open() { return static_cast<double>(next() >> 11) * 0x1.0p-53 + 0x1.0p-54; }

private:
    std::uint64_t state_;
};

// Stream for (seed, a, b), e.g. a = generation, b = particle index.
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
{
    return SplitMix64(mix64(mix64(mix64(seed) ^ a) ^ b));
}

} // namespace shiftgibbs

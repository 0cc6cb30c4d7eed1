#pragma once

#include <cstdint>

namespace gridrisk {

// SplitMix64: the per-stream generator behind scenario sampling. Streams are
// derived from (seed, stream index) so draws are reproducible and independent
// of how samples are distributed over threads.
class Rng {
public:
    explicit Rng(std::uint64_t state) : state_(state) {}

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Deterministic substream for (seed, index), e.g. one per scenario sample.
    static Rng stream(std::uint64_t seed, std::uint64_t index) {
        const std::uint64_t h = mix(seed + 0x9E3779B97F4A7C15ULL * (index + 1));
        return Rng(mix(h ^ 0xD1B54A32D192ED03ULL));
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    // Uniform draw strictly inside (0,1).
    double next_open01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via the inverse-CDF transform; keeps the whole sampler
    // on one deterministic numeric path.
    double next_std_normal();

private:
    std::uint64_t state_;
};

}  // namespace gridrisk

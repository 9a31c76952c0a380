#pragma once

// Seedable random streams.
//
// A stream is identified by (master_seed, stream_id). Its state is a pure
// function of that pair, so replicate b can be generated without touching
// streams 0..b-1, which is what makes parallel replication deterministic.

#include <array>
#include <cstdint>
#include <limits>

namespace cheapsub {

struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;
};

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Child seed for a named sub-task (`domain`) and index under `parent`.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t domain, std::uint64_t index) noexcept
{
    return mix64(mix64(parent ^ mix64(domain)) + index);
}

/// xoshiro256** keyed by a SeedSpec. Satisfies UniformRandomBitGenerator.
class StreamRng {
public:
    using result_type = std::uint64_t;

    explicit StreamRng(SeedSpec seed) noexcept;
    StreamRng(std::uint64_t master_seed, std::uint64_t stream_id) noexcept
        : StreamRng(SeedSpec{master_seed, stream_id})
    {
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound); bound > 0. Lemire's unbiased method.
    std::uint64_t below(std::uint64_t bound) noexcept;

    /// Standard normal draw (Marsaglia polar method).
    double normal() noexcept;

    bool bernoulli(double p) noexcept { return uniform() < p; }

private:
    std::array<std::uint64_t, 4> s_{};
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace cheapsub

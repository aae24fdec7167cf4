#pragma once
// Counter-based random number streams for reproducible Monte Carlo.
//
// Every draw is a pure function of (master seed, stream id, counter), so
// replications and coordinates can be evaluated in any order -- or on any
// number of threads -- without changing a single bit of the output.
// The generator is the SplitMix64 finalizer used in counter mode; the
// counter is scrambled before keying so that nearby streams do not alias.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace smse::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// 64-bit seed for substream `index` of a master seed (replications, rows, ...).
constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return mix64(mix64(master + kGolden) + (index + 1) * kGolden);
}

// Stateless stream of uniforms/normals addressed by counter.
class CounterStream {
public:
    explicit CounterStream(std::uint64_t seed, std::uint64_t stream = 0) noexcept
        : key_(mix64(mix64(seed + kGolden) ^ mix64((stream + 1) * kGolden))) {}

    // Uniform draw strictly inside (0,1).
    double uniform(std::uint64_t counter) const noexcept {
        const std::uint64_t bits = mix64(key_ ^ mix64((counter + 1) * kGolden));
        return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller on counters (2i, 2i+1).
    double normal(std::uint64_t i) const noexcept {
        const double u1 = uniform(2 * i);
        const double u2 = uniform(2 * i + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::uint64_t key() const noexcept { return key_; }

private:
    std::uint64_t key_;
};

} // namespace smse::rng

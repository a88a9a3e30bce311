#pragma once

// Counter-keyed random streams for reproducible parallel simulation.
//
// Stream (seed, index) is xoshiro256** whose 256-bit state is four successive
// SplitMix64 outputs, starting from state mix(seed) ^ mix(index + 1). Sample i
// of a simulation always draws from stream (seed, i), so results do not
// depend on how samples are split across threads.

#include <cstdint>
#include <limits>

namespace improvable {

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class SampleStream {
public:
    using result_type = std::uint64_t;

    SampleStream(std::uint64_t seed, std::uint64_t index) noexcept {
        std::uint64_t sm = splitmix64_mix(seed) ^ splitmix64_mix(index + 1);
        for (auto& word : state_) {
            sm += 0x9e3779b97f4a7c15ULL;
            word = splitmix64_mix(sm);
        }
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
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

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    // Uniform double in (0, 1).
    double uniform_open() noexcept {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

}  // namespace improvable

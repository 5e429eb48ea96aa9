#pragma once

#include <cstdint>
#include <limits>

namespace crw::rng {

/// SplitMix64 output function; a bijective avalanche mixer on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based draw: a pure function of its key. Every random decision in
/// the simulators is addressed as (seed, step, slot), so results never depend
/// on evaluation order or on how trials are spread over workers.
constexpr std::uint64_t keyed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                              std::uint64_t c = 0) noexcept {
    std::uint64_t x = mix64(seed + 0x9e3779b97f4a7c15ULL);
    x = mix64(x ^ (a * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL));
    x = mix64(x ^ (b * 0xaf251af3b0f025b5ULL + 0x8cb92ba72f3d8dd7ULL));
    x = mix64(x ^ (c * 0x9fb21c651e98df25ULL + 0x2545f4914f6cdd1dULL));
    return x;
}

/// Per-trial seed derived from a master seed; distinct trials get distinct
/// streams because `keyed` is injective in the trial index for fixed seed.
constexpr std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) noexcept {
    return keyed(master, trial, 0x7472696c);
}

/// Maps 63 random bits onto [0, bound) by multiply-shift. Bias is at most
/// bound / 2^63, far below anything a simulation can resolve.
inline std::uint32_t scale63(std::uint64_t bits63, std::uint32_t bound) noexcept {
    return static_cast<std::uint32_t>(
        (static_cast<unsigned __int128>(bits63) * bound) >> 63);
}

/// Sequential generator for graph construction. Satisfies
/// UniformRandomBitGenerator, but `below` is used instead of the standard
/// distributions so output is identical across standard library vendors.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    /// Unbiased draw in [0, bound) (Lemire's method).
    std::uint64_t below(std::uint64_t bound) noexcept {
        unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>((*this)()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    template <class RandomIt>
    void shuffle(RandomIt first, RandomIt last) noexcept {
        const auto n = static_cast<std::uint64_t>(last - first);
        for (std::uint64_t i = n; i > 1; --i) {
            const auto j = below(i);
            std::swap(first[i - 1], first[j]);
        }
    }

private:
    std::uint64_t state_;
};

} // namespace crw::rng

#pragma once

#include <cmath>
#include <cstdint>

namespace loadctrl {

// Deterministic counter-based random streams. Every draw is a pure function
// of (seed, stream, lane, counter), so replaying a scenario, reordering
// agent work, or splitting it across threads cannot change a single value.

enum class Stream : std::uint64_t {
    kLoadBound = 1,
    kCurvature = 2,
    kVariant = 3,
    kCurvatureNeg = 4,
    kCurvaturePos = 5,
    kProcessNoise = 6,
    kMeasurementNoise = 7,
    kTest = 100,
};

namespace detail {

// splitmix64 finalizer; full-period mixing of a 64-bit word.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_words(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                               std::uint64_t d) {
    return mix64(mix64(mix64(mix64(a) ^ b) ^ c) ^ d);
}

}  // namespace detail

class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    // Uniform on [0, 1).
    double uniform01(Stream s, std::uint64_t lane, std::uint64_t counter) const {
        const std::uint64_t z = detail::mix_words(
            seed_, static_cast<std::uint64_t>(s), lane, counter * 2);
        return static_cast<double>(z >> 11) * 0x1.0p-53;
    }

    // Uniform on [lo, hi).
    double uniform(Stream s, std::uint64_t lane, std::uint64_t counter, double lo,
                   double hi) const {
        return lo + (hi - lo) * uniform01(s, lane, counter);
    }

    // Standard normal via Box-Muller on two sub-draws of the same counter.
    double gaussian(Stream s, std::uint64_t lane, std::uint64_t counter) const {
        const std::uint64_t z1 = detail::mix_words(
            seed_, static_cast<std::uint64_t>(s), lane, counter * 2);
        const std::uint64_t z2 = detail::mix_words(
            seed_, static_cast<std::uint64_t>(s), lane, counter * 2 + 1);
        // u1 in (0, 1] keeps the log finite.
        const double u1 = (static_cast<double>(z1 >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(z2 >> 11) * 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
    }

  private:
    std::uint64_t seed_;
};

}  // namespace loadctrl

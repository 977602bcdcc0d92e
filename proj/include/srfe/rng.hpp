#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace srfe {

// All randomness in the library flows through Rng. std::mt19937_64 has a
// standardized bit stream, and the uniform/normal transforms below are spelled
// out by hand (instead of std::*_distribution, whose algorithms are
// implementation-defined), so a given seed produces the same draws on every
// platform and standard library.
//
// Stream-splitting rule: substreams are derived as
//   substream(seed, k) = Rng(mix64(seed, k))
// with mix64 a SplitMix64-style finalizer over (seed, k). The sampling module
// assigns one substream per support subset in the complete scheme (stream id =
// lexicographic rank of the subset) and a reserved stream for biases.

inline std::uint64_t mix64(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    static Rng substream(std::uint64_t seed, std::uint64_t stream) {
        return Rng(mix64(seed, stream));
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller; the paired draw is cached, so calls
    /// consume generator output in a fixed, reproducible pattern.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] so the log is finite.
        const double u1 = static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    /// Unbiased integer in [0, n) by rejection.
    std::uint64_t uniform_below(std::uint64_t n) {
        const std::uint64_t threshold = (0ULL - n) % n;
        for (;;) {
            const std::uint64_t r = gen_();
            if (r >= threshold) return r % n;
        }
    }

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace srfe

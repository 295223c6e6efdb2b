// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace occsim {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). Bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed splitting rule used by the experiment harness:
///   hash64(a, b, c) = splitmix64(splitmix64(splitmix64(a) ^ b) ^ c)
/// Any implementation following this rule reproduces the per-trial seeds.
constexpr std::uint64_t hash64(std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept {
    return splitmix64(splitmix64(splitmix64(a) ^ b) ^ c);
}

/// Deterministic source of uniform and normal variates.
///
/// Bits come from std::mt19937_64, whose output sequence is fixed by the
/// standard. Uniforms use the top 53 bits; normals use the Marsaglia polar
/// method. Both are therefore bit-identical across conforming platforms,
/// which std::normal_distribution does not guarantee.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Standard normal variate.
    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = 0.0;
        double v = 0.0;
        double s = 0.0;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double factor = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * factor;
        has_spare_ = true;
        return u * factor;
    }

    /// Fair bit.
    bool bit() noexcept { return (engine_() >> 63) != 0; }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace occsim

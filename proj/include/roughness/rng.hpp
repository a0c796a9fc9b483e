#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace roughness {

// SplitMix64: counter-based 64-bit generator. The i-th output is a fixed
// avalanche hash of seed + i * golden-gamma, so any output is addressable
// from (seed, i) alone and streams can be split without coordination.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : seed_(seed) {}

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t next() {
        counter_ += 0x9E3779B97F4A7C15ull;
        return mix(seed_ + counter_);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

// Seed of an independent stream: experiment path i draws from
// substream_seed(base_seed, i) so results do not depend on worker count.
inline std::uint64_t substream_seed(std::uint64_t base_seed, std::uint64_t stream) {
    return SplitMix64::mix(base_seed ^ SplitMix64::mix(stream + 0x6A09E667F3BCC909ull));
}

// Standard normals via the Box-Muller transform; pairs are consumed in order,
// so a fixed seed yields a fixed sequence.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}

    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - rng_.uniform01();  // in (0, 1]
        const double u2 = rng_.uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    SplitMix64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace roughness

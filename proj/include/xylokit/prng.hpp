#pragma once

#include <cstdint>

namespace xylokit {

/// SplitMix64 (Steele, Lea & Flood's fixed-increment SplittableRandom).
/// Every reproducible stream in the toolchain (Poisson rasters, generated
/// weights) is drawn from this generator so identical seeds give identical
/// bytes on any platform.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform double in [low, high).
    double next_range(double low, double high) {
        return low + next_unit() * (high - low);
    }

private:
    std::uint64_t state_;
};

}  // namespace xylokit

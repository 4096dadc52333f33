#pragma once

#include <cstdint>

namespace entrogate {

// SplitMix64 (Steele, Lea, Flood 2014). Chosen over std::mt19937 +
// std::uniform_* because the output stream is bit-identical on every
// platform, which the synthetic fixtures rely on.
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [0, bound). Modulo applied to the full 64-bit output;
    // the bias is below 2^-50 for the bounds used here.
    uint64_t next_below(uint64_t bound) { return next_u64() % bound; }

private:
    uint64_t state_;
};

}  // namespace entrogate

#pragma once

#include <cstdint>

namespace fraclab {

/// Counter-based random stream: sample i of stream `seed` is a pure function
/// of (seed, i), so parallel shards reproduce the serial sequence exactly.
///
/// The mixing function is splitmix64; each draw advances a local counter.
class CounterRng {
public:
    CounterRng(uint64_t seed, uint64_t counter) : state_(mix(seed ^ 0x9e3779b97f4a7c15ull) + counter * 0xbf58476d1ce4e5b9ull) {}

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    /// Uniform double in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [a, b).
    double uniform(double a, double b) { return a + (b - a) * next_double(); }

private:
    static uint64_t mix(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    uint64_t state_;
};

/// Van der Corput radical-inverse in the given base; the workhorse of the
/// deterministic low-discrepancy (Halton) point sets used by pair samplers.
inline double radical_inverse(uint64_t i, uint32_t base) {
    double inv = 1.0 / base, f = inv, x = 0.0;
    while (i > 0) {
        x += f * static_cast<double>(i % base);
        i /= base;
        f *= inv;
    }
    return x;
}

}  // namespace fraclab

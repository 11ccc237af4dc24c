#pragma once

#include <cstdint>

namespace metriclab {

// Deterministic 64-bit shift-register generator with splittable seeding.
//
// The exact algorithm (reproducible bit-for-bit in any language with 64-bit
// unsigned wrap-around arithmetic; also documented in the README):
//
//   mix64(z):
//     z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
//     z ^= z >> 27;  z *= 0x94D049BB133111EB
//     z ^= z >> 31
//     return z
//
//   next(state):                      // one draw
//     state += 0x9E3779B97F4A7C15     // golden-ratio increment
//     return mix64(state)
//
//   stream(seed, k):                  // split: independent child stream k
//     initial state = mix64(seed + (k + 1) * 0xD1B54A32D192ED03)
//
//   next_double(): next() >> 11, times 2^-53   (uniform in [0, 1))
//
// Every randomized routine derives one stream per logical unit of work
// (sample index, point index, ...), so results are independent of thread
// count and evaluation order.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    static uint64_t mix64(uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    // Independent child stream k of a root seed.
    static Rng stream(uint64_t seed, uint64_t k) {
        return Rng(mix64(seed + (k + 1) * 0xD1B54A32D192ED03ULL));
    }

    uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    // Uniform in [0, 1), 53 random mantissa bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Uniform integer in [0, n).
    uint64_t below(uint64_t n) { return next() % n; }

private:
    uint64_t state_;
};

} // namespace metriclab

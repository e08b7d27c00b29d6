#pragma once

#include <cstdint>
#include <cmath>

namespace invgen {

// Deterministic splittable PRNG (splitmix64 core). All randomness in the
// library flows through this type so that a single 64-bit seed reproduces
// every run bit-for-bit, independent of platform or standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0,1) with 53 random bits.
    double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) {
        // Rejection from the top to avoid modulo bias.
        std::uint64_t threshold = (0ULL - n) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    bool coin() { return (next_u64() & 1ULL) != 0; }

    bool bernoulli(double p) { return unit() < p; }

    // Derives an independent child stream. Children with distinct labels are
    // decorrelated from each other and from the parent's future output.
    Rng child(std::uint64_t label) {
        std::uint64_t s = state_ ^ (0x632be59bd9b4e019ULL * (label + 1));
        s = (s ^ (s >> 30)) * 0xbf58476d1ce4e5b9ULL;
        s = (s ^ (s >> 27)) * 0x94d049bb133111ebULL;
        return Rng(s ^ (s >> 31));
    }

private:
    std::uint64_t state_;
};

} // namespace invgen
